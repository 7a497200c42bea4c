from geosim.devs.scheduler import Clock, Event, EventQueue, run_until, schedule

__all__ = ["Clock", "Event", "EventQueue", "run_until", "schedule"]

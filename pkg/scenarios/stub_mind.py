#!/usr/bin/env python3
"""Deterministic stand-in for a text-model backend.

Speaks the line-delimited mind protocol on stdio: one JSON request per
line ({agent, tick, mode, prompt}), one JSON response ({text}). Plans
cycle through the capabilities named in the prompt, keyed by agent and
tick, so runs are reproducible and replay logs make exact fixtures.
"""

import json
import sys


def answer(req):
    if req["mode"] == "perceive":
        return f"tick {req['tick']}: {req['prompt']}"
    caps = []
    marker = "capabilities: "
    at = req["prompt"].rfind(marker)
    if at >= 0:
        caps = [c.strip() for c in req["prompt"][at + len(marker):].split(",")
                if c.strip()]
    if not caps:
        return ""
    return caps[(req["agent"] + req["tick"]) % len(caps)]


def main():
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        sys.stdout.write(json.dumps({"text": answer(req)}) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()

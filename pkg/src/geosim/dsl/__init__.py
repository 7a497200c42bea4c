from geosim.dsl.doc import ParseError, ScenarioDoc, ScenarioParseError
from geosim.dsl.parser import parse
from geosim.dsl.formatter import format_doc
from geosim.dsl.validate import validate, ValidationReport
from geosim.dsl.compiler import compile_doc, CompiledScenario

__all__ = ["CompiledScenario", "ParseError", "ScenarioDoc",
           "ScenarioParseError", "ValidationReport", "compile_doc",
           "format_doc", "parse", "validate"]

"""Classification toolkit for coprime-universal positive definite forms."""
from .forms_core import (
    GramForm,
    RepresentationReport,
    TargetSet,
    ThetaPrefix,
    evaluate,
    exception_report,
    exceptions,
    format_form,
    parse_form,
    represents,
    represents_form,
    theta_prefix,
    truant,
)

__all__ = [
    "GramForm",
    "RepresentationReport",
    "TargetSet",
    "ThetaPrefix",
    "evaluate",
    "exception_report",
    "exceptions",
    "format_form",
    "parse_form",
    "represents",
    "represents_form",
    "theta_prefix",
    "truant",
]

__version__ = "0.1.0"

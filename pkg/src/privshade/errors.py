"""Exception types raised by privshade.

Every error carries a short machine-readable ``code`` so the CLI can emit
one-line JSON without string matching.
"""


class PrivshadeError(Exception):
    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class PngDecodeError(PrivshadeError):
    code = "png_decode"

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset

    def to_dict(self):
        d = super().to_dict()
        d["offset"] = self.offset
        return d


class UnsupportedFormatError(PrivshadeError):
    code = "unsupported_format"


class DegenerateHistogramError(PrivshadeError):
    code = "degenerate_histogram"


class UndefinedWidthError(PrivshadeError):
    code = "undefined_width"


class InvalidMaskSizeError(PrivshadeError):
    code = "invalid_mask_size"


class InvalidWidthError(PrivshadeError):
    code = "invalid_width"


class IncompletePlanError(PrivshadeError):
    code = "incomplete_plan"


class InvalidContrastError(PrivshadeError):
    code = "invalid_contrast"


class NoMarksError(PrivshadeError):
    code = "no_marks"


class UnknownChartTypeError(PrivshadeError):
    code = "unknown_chart_type"

    def __init__(self, chart_type, valid):
        super().__init__(
            f"unknown chart type {chart_type!r}; valid types: {', '.join(valid)}")
        self.valid = list(valid)

    def to_dict(self):
        d = super().to_dict()
        d["valid"] = self.valid
        return d


class ConfigError(PrivshadeError):
    code = "config"


class RangeError(PrivshadeError):
    code = "range"

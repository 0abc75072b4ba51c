"""Exception hierarchy.

Every error a user can trigger with bad input derives from ``AnnosentError``;
the CLI maps those to exit status 2.
"""


class AnnosentError(Exception):
    """Base class for input/usage errors."""


class MalformedLine(AnnosentError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class ScoreOutOfRange(AnnosentError):
    pass


class DuplicateEntry(AnnosentError):
    pass


class StoplistContainsNegation(AnnosentError):
    pass


class XmlSyntax(AnnosentError):
    pass


class SchemaViolation(AnnosentError):
    pass


class DanglingReference(AnnosentError):
    pass


class InvalidGraph(AnnosentError):
    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(f"{v.kind}: {', '.join(v.ids)}" for v in self.violations)
        super().__init__(f"invalid annotation graph ({detail})")


class PdfUnreadable(AnnosentError):
    pass


class PdfEncrypted(AnnosentError):
    pass


class SchemaMismatch(AnnosentError):
    pass


class IoFailure(AnnosentError):
    pass


class StoreLocked(IoFailure):
    """Another writer holds the store."""


class UnknownDocument(AnnosentError):
    pass


class MissingScore(AnnosentError):
    def __init__(self, annotation_id: str):
        super().__init__(f"no score for annotation {annotation_id!r}")
        self.annotation_id = annotation_id

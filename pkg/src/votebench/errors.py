"""Shared error hierarchy.

Every domain error carries a stable machine-readable ``code`` so the HTTP
layer and the CLI can map failures to problem documents / exit codes without
string-matching messages.
"""


class VotebenchError(Exception):
    """Base class for all domain errors."""

    code = "internal"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_problem(self) -> dict:
        doc = {"code": self.code, "message": self.message}
        if self.field is not None:
            doc["field"] = self.field
        return doc


class ValidationFailed(VotebenchError):
    """A ballot failed validation; carries the individual violations."""

    code = "ValidationFailed"

    def __init__(self, violations):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = list(violations)


class InvalidDefinition(VotebenchError):
    code = "InvalidDefinition"


class UnknownVoter(VotebenchError):
    code = "UnknownVoter"


class UnknownCampaign(VotebenchError):
    code = "UnknownCampaign"


class CampaignNotOpen(VotebenchError):
    code = "CampaignNotOpen"


class CampaignFinalized(VotebenchError):
    code = "CampaignFinalized"


class CampaignDraft(VotebenchError):
    code = "CampaignDraft"


class EmptyTagSet(VotebenchError):
    code = "EmptyTagSet"


class NotVisibleToVoter(VotebenchError):
    code = "NotVisibleToVoter"


class NotAuthorized(VotebenchError):
    code = "NotAuthorized"


class ClockSkew(VotebenchError):
    code = "ClockSkew"


class ResultsNotReady(VotebenchError):
    code = "ResultsNotReady"


class ResultsNotReleased(VotebenchError):
    code = "ResultsNotReleased"


class RatingOutOfRange(VotebenchError):
    code = "RatingOutOfRange"


class DuplicateMethod(VotebenchError):
    code = "DuplicateMethod"


class MixedQuestions(VotebenchError):
    code = "MixedQuestions"


class RankOutOfRange(VotebenchError):
    code = "RankOutOfRange"


class StoreNotEmpty(VotebenchError):
    code = "StoreNotEmpty"


class CorruptEvent(VotebenchError):
    code = "CorruptEvent"


class StorageFull(VotebenchError):
    code = "StorageFull"


class UnknownQuestion(VotebenchError):
    code = "UnknownQuestion"


class VerificationFailed(VotebenchError):
    code = "VerificationFailed"


class SessionExpired(VotebenchError):
    code = "SessionExpired"

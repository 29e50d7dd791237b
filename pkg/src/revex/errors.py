"""Exception hierarchy. Everything under DataError maps to CLI exit code 2."""


class RevexError(Exception):
    pass


class ConfigError(RevexError):
    """Bad configuration or usage (exit code 1)."""


class DataError(RevexError):
    """Input data is malformed or inconsistent (exit code 2)."""


class EmptyQueryError(DataError):
    def __init__(self, message="query sentence has an empty term set", record=None):
        self.record = record
        if record is not None:
            message = f"{message} ({record})"
        super().__init__(message)


class MissingDocumentError(DataError):
    def __init__(self, missing_ids):
        self.missing_ids = sorted(set(missing_ids))
        super().__init__("unresolved reference_id(s): " + ", ".join(self.missing_ids))


class SingleClassError(DataError):
    pass


class EmptyCorpusError(DataError):
    pass


class TooFewInstancesError(DataError):
    pass

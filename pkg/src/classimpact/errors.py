"""Exception hierarchy shared by every stage of the pipeline."""


class ClassImpactError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class MalformedRecord(ClassImpactError):
    def __init__(self, line, reason="", source=None):
        self.line = line
        self.source = source
        self.reason = reason
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"malformed record at {where}: {reason}" if reason else f"malformed record at {where}")


class DuplicateCommit(ClassImpactError):
    def __init__(self, commit_id):
        self.commit_id = commit_id
        super().__init__(f"duplicate commit id {commit_id!r}")


class DuplicateRequirement(ClassImpactError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"duplicate requirement key {key!r}")


class KeyPrefixMismatch(ClassImpactError):
    def __init__(self, key, project_key):
        self.key = key
        super().__init__(f"requirement {key!r} does not belong to project {project_key!r}")


class UnknownRelease(ClassImpactError):
    def __init__(self, key, release_id):
        super().__init__(f"requirement {key!r} names release {release_id!r} which is not in the release list")


class OrphanCommit(ClassImpactError):
    def __init__(self, commit_id, release_id):
        self.commit_id = commit_id
        super().__init__(f"first commit {commit_id!r} of release {release_id!r} has no parent")


class EmptyHistory(ClassImpactError):
    """Raised by the temporal-locality formulas when there is no prior requirement."""


class UnknownMetricName(ClassImpactError):
    def __init__(self, name, line=None):
        self.name = name
        super().__init__(f"unknown metric name {name!r}" + (f" (line {line})" if line else ""))


class NonNumericValue(ClassImpactError):
    def __init__(self, value, line=None):
        super().__init__(f"non-numeric metric value {value!r}" + (f" (line {line})" if line else ""))


class DegenerateSplit(ClassImpactError):
    pass


class UnorderedMatrix(ClassImpactError):
    """The matrix rows are not in chronological requirement order."""


class InsufficientNegatives(ClassImpactError):
    pass


class SingleClassTraining(ClassImpactError):
    pass


class NonFiniteFeature(ClassImpactError):
    pass


class FeatureMismatch(ClassImpactError):
    pass


class ZeroMargin(ClassImpactError):
    pass


class DegenerateInput(ClassImpactError):
    pass

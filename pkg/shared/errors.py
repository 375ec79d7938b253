class OpfrError(Exception):
    pass


class InvalidParameter(OpfrError):
    pass


class DimensionMismatch(OpfrError):
    def __init__(self, expected: int, actual: int) -> None:
        super().__init__(f"dimension mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class UnknownMetric(OpfrError):
    pass


# Datasets


class DatasetError(OpfrError):
    pass


class DatasetParseError(DatasetError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class MalformedHeader(DatasetParseError):
    pass


class RowArityMismatch(DatasetParseError):
    pass


class MalformedRow(DatasetParseError):
    pass


class NonFiniteValue(DatasetParseError):
    pass


class LabelOutOfRange(DatasetParseError):
    pass


class MissingClass(DatasetParseError):
    pass


class DuplicateSampleId(DatasetParseError):
    pass


class SampleCountMismatch(DatasetParseError):
    pass


class EmptyDataset(DatasetError):
    pass


class InfeasibleSplit(DatasetError):
    pass


# Training


class TrainingError(OpfrError):
    pass


class InsufficientSamples(TrainingError):
    pass


class SingleClassTraining(TrainingError):
    pass


class DegenerateDensity(TrainingError):
    pass


# Evaluation


class EvaluationError(OpfrError):
    pass


class UnknownCandidate(EvaluationError):
    pass


class NotApplicable(EvaluationError):
    pass


class EmptyInput(EvaluationError):
    pass


class RankOutOfRange(EvaluationError):
    pass


# Model files


class ModelFormatError(OpfrError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class ModelVersionError(ModelFormatError):
    pass


class ModelCorruptionError(ModelFormatError):
    pass


# Harness


class ExperimentError(OpfrError):
    def __init__(
        self,
        message: str,
        dataset: str | None = None,
        run: int | None = None,
        technique: str | None = None,
    ) -> None:
        context = ", ".join(
            f"{key}={value}"
            for key, value in (
                ("dataset", dataset),
                ("run", run),
                ("technique", technique),
            )
            if value is not None
        )
        super().__init__(f"{message} ({context})" if context else message)
        self.dataset = dataset
        self.run = run
        self.technique = technique


# Ranking files


class RankingFormatError(OpfrError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason

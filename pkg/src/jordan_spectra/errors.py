class JordanSpectraError(Exception):
    pass


class SingularMatrix(JordanSpectraError):
    def __init__(self, index, pivot=0.0):
        super().__init__(f"pivot {index} has magnitude {pivot:.3e}, below the pivot floor")
        self.index = index
        self.pivot = pivot


class NoConvergence(JordanSpectraError):
    def __init__(self, index):
        super().__init__(f"QR iteration did not converge for eigenvalue index {index}")
        self.index = index


class RegimeViolation(JordanSpectraError):
    pass


class ContourTooClose(JordanSpectraError):
    pass


class NodeBudgetExceeded(JordanSpectraError):
    pass


class MixedSpecs(JordanSpectraError):
    pass


class InsufficientData(JordanSpectraError):
    pass

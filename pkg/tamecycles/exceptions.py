from typing import Any, Generic, Optional, Sequence, TypeVar

T = TypeVar("T")


class EngineError(Exception, Generic[T]):
    """
    Base engine exception. `content` carries whatever the caller needs to
    reproduce the failure: an offending pair, a counterexample, valid names.
    """

    default_message = "Engine error"

    def __init__(self, message: Optional[str] = None, content: T = None) -> None:
        self.message = message or self.default_message
        self.content = content
        super().__init__(self.message)


class NotPrime(EngineError[int]):
    default_message = "Coefficient characteristic must be prime"

    def __init__(self, ell: int) -> None:
        super().__init__(f"{self.default_message}: {ell}", ell)


class ShapeMismatch(EngineError[Any]):
    default_message = "Matrix shape does not match its endpoints"


class NotAChainMap(EngineError[int]):
    default_message = "Map does not commute with the differentials"


class NotAPartialOrder(EngineError[Sequence[str]]):
    default_message = "Relation is not a partial order"


class NotMonotone(EngineError[Sequence[str]]):
    default_message = "Map is not order preserving"


class NotUpClosed(EngineError[Sequence[str]]):
    default_message = "Subset is not open (up-closed)"


class NotDownClosed(EngineError[Sequence[str]]):
    default_message = "Subset is not closed (down-closed)"


class NotFunctorial(EngineError[Any]):
    default_message = "Restrictions do not compose"


class NaturalityFailure(EngineError[Any]):
    default_message = "Transformation is not natural on a sampled morphism"


class NotStabilized(EngineError[Any]):
    default_message = "not stabilized"


class NonTameOrder(EngineError[Sequence[int]]):
    default_message = "Order is divisible by the coefficient characteristic"

    def __init__(self, order: int, ell: int) -> None:
        super().__init__(
            f"{self.default_message} ({order} vs {ell}), use homotopy_fixed_points",
            (order, ell),
        )


class HypothesisFailure(EngineError[Any]):
    default_message = "Hypothesis of the construction fails on a sample"


class MissingAdjoint(EngineError[None]):
    default_message = "No left adjoint supplied for the gluing functor"


class MissingTransition(EngineError[Sequence[Any]]):
    default_message = "Tower transition missing"


class IncomparableEndpoints(EngineError[Sequence[Any]]):
    default_message = "Endpoints are incomparable in the grid order"


# ###################################################################################
# ################################ Input Exceptions #################################
# ###################################################################################


class MalformedModel(EngineError[str]):
    def __init__(self, message: str = "Malformed model file", path: str = "$") -> None:
        super().__init__(f"{message} (at {path})", path)


class UnknownSuite(EngineError[Sequence[str]]):
    def __init__(self, name: str, known: Sequence[str]) -> None:
        super().__init__(
            f"Unknown suite {name!r}; known suites: {', '.join(known)}", list(known)
        )

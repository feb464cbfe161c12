"""Diagnostic reports produced by the balance checks."""

from pydantic import BaseModel, Field

from ..config import BALANCE_TOLERANCE


class BalanceReport(BaseModel):
    """Worst violation of one balance relation over all stored coefficients."""

    relation: str
    max_abs: float = 0.0
    max_rel: float = 0.0
    worst_index: tuple[int, ...] | None = None
    passed: bool = True
    tolerance: float = BALANCE_TOLERANCE
    checked: int = 0
    bath_label: str = ""
    per_bath: list["BalanceReport"] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @classmethod
    def aggregate(
        cls, relation: str, children: list["BalanceReport"], tolerance: float
    ) -> "BalanceReport":
        """Combine per-bath reports; the worst child determines the result."""
        if not children:
            return cls(relation=relation, tolerance=tolerance)
        worst = max(children, key=lambda r: (not r.passed, r.max_rel))
        return cls(
            relation=relation,
            max_abs=max(r.max_abs for r in children),
            max_rel=worst.max_rel,
            worst_index=worst.worst_index,
            passed=all(r.passed for r in children),
            tolerance=tolerance,
            checked=sum(r.checked for r in children),
            per_bath=children,
            notes=[note for r in children for note in r.notes],
        )

    def summary(self) -> str:
        """One-line human-readable description."""
        status = "PASS" if self.passed else "FAIL"
        worst = self.worst_index
        index = "-" if worst is None else ",".join(map(str, worst))
        label = f" [{self.bath_label}]" if self.bath_label else ""
        return (
            f"{self.relation}{label}: {status} max_rel={self.max_rel:.3e} "
            f"max_abs={self.max_abs:.3e} worst=({index}) tol={self.tolerance:.1e} "
            f"checked={self.checked}"
        )


class GibbsResidual(BaseModel):
    """Generator applied to the grand-canonical Gibbs state, split by element type.

    ``case_a`` holds off-diagonal elements between different energy clusters,
    ``case_b`` the diagonal and ``case_c`` off-diagonal elements inside one cluster.
    """

    residual: float
    case_a: float
    case_b: float
    case_c: float
    generator_norm: float

    @property
    def relative(self) -> float:
        """Residual in units of the generator max-norm."""
        return self.residual / self.generator_norm if self.generator_norm else 0.0

from dataclasses import dataclass


@dataclass(frozen=True)
class Budget:
    """Enumeration limits. Exceeding one raises SizeBudgetExceeded; nothing is truncated."""

    max_objects: int = 6
    max_morphisms: int = 200
    rewrite_steps: int = 5
    length_bound: int = 4
    max_two_cells: int = 4096


DEFAULT_BUDGET = Budget()
UNBOUNDED = Budget(max_objects=10**9, max_morphisms=10**9, max_two_cells=10**9)

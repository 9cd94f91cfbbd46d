"""Semantics-preserving rewrites, one family per transformable attribute."""

# Family modules register their kinds on import.
from stylearmor.transforms import control, decls, exprs, functions, memory, naming, preproc  # noqa: F401
from stylearmor.transforms.base import (
    TransformPlan,
    TransformStep,
    applicable,
    apply,
    get_family,
    kinds,
)
from stylearmor.transforms.planfile import dump_plan, load_plan, read_plan, write_plan
from stylearmor.transforms.planner import PlanResult, build_plan, execute_plan, plan_imitation

__all__ = [
    "PlanResult",
    "TransformPlan",
    "TransformStep",
    "applicable",
    "apply",
    "build_plan",
    "dump_plan",
    "execute_plan",
    "get_family",
    "kinds",
    "load_plan",
    "plan_imitation",
    "read_plan",
    "write_plan",
]

"""Reference far fields from the independent solvers.

Dispatches to the partial-wave solver for a single sphere and to the
boundary-element solver for small multi-sphere clusters, and packages the
result in the same :class:`~bubbles.fields.FarFieldPattern` container the
point-interaction model produces, tagged with the oracle that made it.
"""

from __future__ import annotations

import numpy as np

from .bem import OracleDomainError, bem_far_values, bem_solve
from .fields import FarFieldPattern, cross_section_rule, fibonacci_directions
from .geometry import Cluster
from .mie import far_values as mie_far_values, mie_sphere
from .physics import MediumSpec

__all__ = ["ORACLE_BEM", "ORACLE_MIE", "oracle_far_field"]

ORACLE_MIE = "oracle:mie"
ORACLE_BEM = "oracle:bem"


def oracle_far_field(
    cluster: Cluster,
    medium: MediumSpec,
    theta=(0.0, 0.0, 1.0),
    directions: np.ndarray | None = None,
    method: str = "auto",
    order: int = 2,
) -> FarFieldPattern:
    """Reference far-field pattern for a sphere cluster.

    ``method`` is ``"mie"`` (single sphere only), ``"bem"``, or ``"auto"``
    (partial waves when the cluster has one bubble, boundary elements for
    up to :data:`bubbles.bem.MAX_SPHERES` bubbles).
    """
    theta = np.asarray(theta, dtype=float)
    if directions is None:
        directions = fibonacci_directions()
    directions = np.asarray(directions, dtype=float)
    m = len(cluster.bubbles)
    if method == "auto":
        method = "mie" if m == 1 else "bem"
    if method == "mie":
        if m != 1:
            raise OracleDomainError("partial-wave oracle handles exactly one sphere")
        shape = cluster.bubbles[0]
        if shape.kind != "sphere":
            raise OracleDomainError("partial-wave oracle requires a sphere")
        mat = medium.per_bubble[0]
        solution = mie_sphere(
            shape.scale * shape.radius, mat.rho_b, mat.k_b, medium, center=shape.center
        )

        def evaluate(d):
            return mie_far_values(solution, d, theta)

        source = ORACLE_MIE
    elif method == "bem":
        solution = bem_solve(cluster, medium, order=order, theta=theta)

        def evaluate(d):
            return bem_far_values(solution, d)

        source = ORACLE_BEM
    else:
        raise ValueError(f"unknown oracle method {method!r}")
    values = evaluate(directions)
    cs_dirs, cs_weights = cross_section_rule()
    cs_values = evaluate(cs_dirs)
    cross_section = float(np.sum(cs_weights * np.abs(cs_values) ** 2))
    return FarFieldPattern(
        directions=directions,
        theta=theta,
        values=values,
        cross_section=cross_section,
        kappa0=medium.kappa0,
        source=source,
    )

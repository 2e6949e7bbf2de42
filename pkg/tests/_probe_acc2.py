import math
import sys

sys.path.insert(0, "/root/pkg/src")
import numpy as np

from lorpto.cli import chunk_rng
from lorpto.core import Separations6, ptolemy_slack, slack_scale
from lorpto.minkowski import (
    HyperbolaSpec,
    MinkowskiSpace,
    classify_equality_case,
    hyperbola_points,
)

FLAT1 = MinkowskiSpace(1)


def boosted_frame(rng, n):
    # random orthonormal (e_t, e_x) pair in R^{1,n} via a boost of (1,0,..) (0,1,0,..)
    chi = rng.uniform(-1.2, 1.2)
    if n == 1:
        et = (math.cosh(chi), math.sinh(chi))
        ex = (math.sinh(chi), math.cosh(chi))
        return et, ex
    # boost along a random spatial unit vector
    u = rng.normal(size=n)
    u /= np.linalg.norm(u)
    et = np.concatenate([[math.cosh(chi)], math.sinh(chi) * u])
    ex = np.concatenate([[math.sinh(chi)], math.cosh(chi) * u])
    return tuple(et), tuple(ex)


worst_h = 0.0
bad_class_h = 0
rng = chunk_rng(0, 0)
for trial in range(1000):
    n = 1 if trial % 2 == 0 else 3
    space = MinkowskiSpace(n)
    a = rng.uniform(0.2, 3.0)
    center = tuple(rng.uniform(-2.0, 2.0, size=n + 1))
    et, ex = boosted_frame(rng, n)
    h = HyperbolaSpec(
        a=a, center=space.event(*center), branch=1 if rng.random() < 0.5 else -1,
        e_t=et, e_x=ex,
    )
    us = np.sort(rng.uniform(-1.5, 1.5, size=4))
    if np.min(np.diff(us)) < 1e-3:
        continue
    quad = hyperbola_points(h, us)
    seps = Separations6.from_events(space, *quad)
    slack = ptolemy_slack(seps)
    rel = abs(slack) / (1e-9 * slack_scale(seps))
    worst_h = max(worst_h, rel)
    label = classify_equality_case(quad)
    if label != "rectangular_hyperbola":
        bad_class_h += 1
        if bad_class_h < 4:
            print("misclass:", label, "a=", a, "us=", us)
print("hyperbola worst |slack|/(1e-9*scale):", worst_h, "misclass:", bad_class_h)

# collinear quadruples
worst_c = 0.0
exact_zero = 0
bad_class_c = 0
for trial in range(1000):
    n = 1 if trial % 2 == 0 else 3
    space = MinkowskiSpace(n)
    p = rng.uniform(-2.0, 2.0, size=n + 1)
    chi = rng.uniform(-1.2, 1.2)
    if n == 1:
        u = np.array([math.cosh(chi), math.sinh(chi)])
    else:
        sp = rng.normal(size=n)
        sp /= np.linalg.norm(sp)
        u = np.concatenate([[math.cosh(chi)], math.sinh(chi) * sp])
    ts = np.sort(rng.uniform(0.0, 3.0, size=4))
    if np.min(np.diff(ts)) < 1e-3:
        continue
    quad = [space.event(*(p + t * u)) for t in ts]
    seps = Separations6.from_events(space, *quad)
    slack = ptolemy_slack(seps)
    if slack == 0.0:
        exact_zero += 1
    worst_c = max(worst_c, abs(slack) / (1e-9 * slack_scale(seps)))
    label = classify_equality_case(quad)
    if label != "timelike_line":
        bad_class_c += 1
print("collinear worst rel:", worst_c, "exact zero:", exact_zero, "/1000 misclass:", bad_class_c)

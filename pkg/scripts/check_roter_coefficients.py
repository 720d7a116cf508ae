"""Compare the derived and the originally published RT -> GRT coefficient maps,
and check the quasi-constant-curvature coefficient formulas.

    python3 scripts/check_roter_coefficients.py [--points 5] [--seed 1]
"""
import argparse
from dataclasses import dataclass

import numpy as np

from curvform import tensor_algebra as ta
from curvform.catalog import MET1_PRESETS, build_met1, get_entry
from curvform.classify import (fit_linear_combination, grt_basis, quasi_constant_coefficients,
                               quasi_constant_curvature, quasi_einstein, rt_basis, rt_to_grt_coefficients,
                               rt_to_grt_coefficients_as_printed)
from curvform.curvature import curvature_package


@dataclass(frozen=True)
class Config:
    points: int = 5
    seed: int = 1
    draws: int = 10


def sample(cfg, dim=5):
    box = get_entry("met1").sample_box(dim)
    rng = np.random.default_rng(cfg.seed)
    return box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((cfg.points, dim)), rng


def roter_family(cfg):
    chart = build_met1(*MET1_PRESETS["iii"])
    points, rng = sample(cfg)
    worst = {"derived": 0.0, "published": 0.0}
    for x in points:
        pkg = curvature_package(chart, x)
        N = fit_linear_combination(pkg.R, rt_basis(pkg)).coefficients
        basis = grt_basis(pkg)
        for L456 in rng.normal(size=(cfg.draws, 3)):
            for name, fn in (("derived", rt_to_grt_coefficients), ("published", rt_to_grt_coefficients_as_printed)):
                L = fn(*N, pkg.kappa, pkg.n, *L456) + tuple(L456)
                res = ta.norm(pkg.R - sum(c * b for c, b in zip(L, basis))) / ta.norm(pkg.R)
                worst[name] = max(worst[name], res)
    print("RT -> GRT on the case (iii) preset, max |R - sum L_i B_i| / |R|:")
    for name, v in worst.items():
        print(f"  {name:9} {v:.3e}")


def quasi_constant(cfg):
    print("quasi-Einstein / quasi-constant curvature:")
    for label, (f, h) in (("case (iii)", MET1_PRESETS["iii"]), ("f=exp(x1), h=1", ("exp(x1)", "1"))):
        chart = build_met1(f, h)
        points, _ = sample(cfg)
        for x in points[:2]:
            pkg = curvature_package(chart, x)
            eig = np.sort(np.linalg.eigvals(pkg.g_inv @ pkg.S).real)
            qe = quasi_einstein(pkg)
            if qe is None:
                print(f"  {label:16} not quasi-Einstein; Ricci eigenvalues {np.array2string(eig, precision=4)}")
                continue
            qcc = quasi_constant_curvature(pkg, eta=qe.eta)
            L = fit_linear_combination(pkg.R, grt_basis(pkg)).coefficients
            ap, bp = quasi_constant_coefficients(L, qe.alpha, qe.beta, qe.eta @ pkg.g_inv @ qe.eta)
            print(f"  {label:16} alpha={qe.alpha:.6f} beta={qe.beta:.6f}  fitted (a', b')=({qcc.alpha_prime:.6f}, "
                  f"{qcc.beta_prime:.6f}) predicted ({ap:.6f}, {bp:.6f}) fit residual {qcc.residual:.1e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    cfg = Config(points=args.points, seed=args.seed)
    roter_family(cfg)
    quasi_constant(cfg)


if __name__ == "__main__":
    main()

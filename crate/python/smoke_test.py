"""Smoke test for the `linfb` extension module.

Build first:

    cargo build -p linfb-py --release --features extension-module

The script copies target/<profile>/liblinfb.so to a temporary directory as
linfb.so and imports it from there.
"""

import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "liblinfb.so")
        if os.path.exists(lib):
            dest = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(dest, "linfb.so"))
            sys.path.insert(0, dest)
            import linfb

            return linfb
    sys.exit("liblinfb.so not found; build the linfb-py crate first")


def main():
    linfb = load()

    assert linfb.rho_star(1, 1, 0, 5) == 0.0
    rho = linfb.rho_star(1, 1, 5, 5)
    assert linfb.rho_residual(1, 1, 5, 5, rho) < 1e-12

    sym = linfb.symmetric_sum_capacity(1, 10)
    assert abs(sym - 0.5 * math.log2(1 + 10 * (1 + rho))) < 1e-12
    assert abs(linfb.k_user_symmetric_sum_capacity(2, 10) - sym) < 1e-8
    try:
        linfb.phi_k(2, 10, "printed")
        raise AssertionError("printed variant should have no root at K=2")
    except ValueError:
        pass

    region = linfb.mac_siso_region(1, 1, 10)
    assert abs(region.max_sum_rate() - sym) < 1e-4
    base = linfb.nofb_bc_siso_region(1 / math.sqrt(5), 1, 10)
    fb = linfb.mac_siso_region(1 / math.sqrt(5), 1, 10)
    assert fb.min_slack_over(base) >= -1e-9

    spec = linfb.ChannelSpec([[1.0, 0.4], [-0.3, 0.9]], [[0.2, 1.1]], 3.0)
    design = linfb.FeedbackDesign.random(spec, 3, "D", 0.5, 7)
    report = linfb.verify_duality_identities(design, spec)
    assert report["passed"], report
    again = linfb.FeedbackDesign.from_json(design.to_json(), spec)
    assert again.matrices() == design.matrices()

    power = linfb.verify_power_lemma(design, spec, 20000, 1)
    assert power["identity_residual"] < 1e-9, power

    a = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]
    assert linfb.reverse(linfb.reverse(a)) == a

    siso = linfb.ChannelSpec.siso(1, 1, 10)
    zero = linfb.FeedbackDesign.zeros("D", 1, siso)
    inner = linfb.multiletter_inner_bound(siso, zero, 33)
    assert abs(inner.max_sum_rate() - 0.5 * math.log2(11)) < 1e-6

    print("linfb smoke test ok:", region, design)


if __name__ == "__main__":
    main()

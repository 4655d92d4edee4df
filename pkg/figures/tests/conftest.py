import numpy as np
import pytest

SWEEP_HEADER = (
    "kind,quantity,sigma,n_samples,mean,std,stderr,"
    "master_seed,degenerate_count,nonconverged_count"
)


def fake_sweep_rows(kind, quantity, sigmas, means, stds=None):
    stds = stds if stds is not None else [m / 2 for m in means]
    lines = []
    for s, m, d in zip(sigmas, means, stds):
        lines.append(
            f"{kind},{quantity},{float(s)!r},10000,{float(m)!r},{float(d)!r},{float(d) / 100!r},42,0,0"
        )
    return lines


def write_sweep_csv(path, blocks):
    """blocks: list of (kind, quantity, sigmas, means[, stds]) tuples."""
    lines = [SWEEP_HEADER]
    for block in blocks:
        lines.extend(fake_sweep_rows(*block))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def sigmas():
    return list(np.geomspace(0.01, 100, 12))

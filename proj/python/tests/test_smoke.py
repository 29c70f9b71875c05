import numpy as np
import pytest
import scipy.stats
from skimage.metrics import structural_similarity

import echoq


def test_region_division_partitions_the_myocardium():
    labels, sector = echoq.chamber_phantom("A4C", 128, 128)
    out = echoq.divide_regions(labels, "A4C", sector=sector, spacing=(0.5, 0.5))
    names = echoq.region_names()
    assert len(names) == 8
    # the six wall segments partition MYO; the two annulus regions overlap them
    masks = np.stack([out["masks"][n] for n in names[:6]])
    assert masks.sum(axis=0).max() == 1
    assert np.array_equal(masks.any(axis=0), (labels == 2) & sector)
    assert set(out["landmarks"]) == set("ABCDEFGHIJKL")
    assert not any(out["excluded"].values())
    assert '"format": "echoq-regions/1"' in out["json"] or '"format":"echoq-regions/1"' in out["json"]


def test_mirrored_labels_give_mirrored_regions():
    labels, sector = echoq.chamber_phantom("A2C", 112, 128, seed=5)
    a = echoq.divide_regions(labels, "A2C", sector=sector)
    b = echoq.divide_regions(labels[:, ::-1], "A2C", sector=sector[:, ::-1])
    for side, other in (("left", "right"), ("right", "left")):
        for level in ("basal", "mid", "apical"):
            assert np.array_equal(a["masks"][f"{level}_{side}"][:, ::-1], b["masks"][f"{level}_{other}"])


def test_errors_map_to_exception_classes():
    labels, _ = echoq.chamber_phantom("ALAX")
    with pytest.raises(echoq.ValidationError, match="AO label unexpected"):
        echoq.divide_regions(labels, "A4C")
    with pytest.raises(echoq.InputError):
        echoq.divide_regions(labels, "PSAX")
    assert issubclass(echoq.InputError, echoq.Error)


def test_gcnr_against_histogram_overlap():
    rng = np.random.default_rng(1)
    roi = rng.integers(60, 200, 5000).astype(np.uint8)
    bg = rng.integers(0, 120, 7000).astype(np.uint8)
    p = np.bincount(roi, minlength=256) / roi.size
    q = np.bincount(bg, minlength=256) / bg.size
    assert echoq.gcnr(roi, bg) == pytest.approx(1 - np.minimum(p, q).sum(), abs=1e-12)
    assert echoq.gcnr(roi, roi) == 0.0


def test_contrast_phantom_cnr():
    bmode, labels = echoq.contrast_phantom(pixels_per_region=100000, seed=3)
    cnr, cr = echoq.cnr(bmode[labels == 2], bmode[labels == 1])
    assert cnr == pytest.approx(80 / np.sqrt(15**2 + 15**2), abs=0.1)
    assert cr == pytest.approx(3.0, abs=0.05)


def test_frame_metrics_rows():
    labels, sector = echoq.chamber_phantom("A4C", 128, 128)
    rng = np.random.default_rng(2)
    bmode = rng.integers(0, 256, labels.shape).astype(float)
    rows = echoq.frame_metrics(bmode, labels, "A4C", sector=sector, coherence=np.full(labels.shape, 0.5))
    assert [r["region"] for r in rows] == echoq.region_names()
    assert all(r["coherence"] == pytest.approx(0.5) for r in rows)


def test_coherence_factor_against_numpy():
    rng = np.random.default_rng(4)
    ch = rng.normal(size=(6, 5, 16)) + 1j * rng.normal(size=(6, 5, 16))
    expected = np.abs(ch.sum(axis=2)) / np.abs(ch).sum(axis=2)
    assert np.allclose(echoq.coherence_factor(ch, threads=2), expected, atol=1e-12)
    aligned = np.exp(1j * 0.3) * np.ones((2, 3, 8))
    assert np.allclose(echoq.coherence_factor(aligned), 1.0)
    assert np.allclose(echoq.gamma_normalize(np.full((2, 2), 0.25)), 0.5)


def test_ssim_matches_scikit_image():
    rng = np.random.default_rng(5)
    t = rng.random((40, 36))
    p = np.clip(t + rng.normal(0, 0.1, t.shape), 0, 1)
    _, full = structural_similarity(t, p, gaussian_weights=True, sigma=1.5, use_sample_covariance=False,
                                    data_range=1.0, full=True)
    assert echoq.ssim(t, p) == pytest.approx(full.mean(), abs=1e-9)
    assert echoq.ssim(t, t) == 1.0


def test_psnr_and_rpe():
    t = np.full((8, 8), 0.5)
    assert echoq.psnr(t, t + 0.1) == pytest.approx(20.0, abs=1e-6)
    assert echoq.psnr(t, t) == float("inf")
    assert echoq.rpe(np.zeros((2, 2)), np.full((2, 2), 0.01)) == pytest.approx(100.0)


def test_statistics_against_scipy():
    rng = np.random.default_rng(6)
    x = rng.integers(1, 6, 200).astype(float)
    y = x + rng.integers(-1, 2, 200)
    assert echoq.spearman(x, y) == pytest.approx(scipy.stats.spearmanr(x, y).statistic, abs=1e-12)
    assert np.allclose(echoq.average_ranks(x), scipy.stats.rankdata(x))

    a = rng.normal(size=12)
    b = a + rng.normal(0.3, 1.0, 12)
    w = echoq.wilcoxon_signed_rank(a, b)
    ref = scipy.stats.wilcoxon(a, b, method="exact")
    assert w["exact"]
    assert w["statistic"] == ref.statistic
    assert w["p_value"] == pytest.approx(ref.pvalue, abs=1e-12)

    slope, intercept = echoq.fit_linear([0.0, 1.0, 2.0], [1.0, 3.0, 5.0])
    assert (slope, intercept) == pytest.approx((2.0, 1.0))
    assert echoq.quality_category(2.5) == 3


def test_histogram_match_moments():
    rng = np.random.default_rng(7)
    img = rng.integers(0, 256, (400, 400)).astype(float)
    out = echoq.histogram_match(img)
    assert abs(out.mean() - 127) <= 2
    assert abs(out.std() - 32) <= 3


def test_agreement_by_quality():
    rows = echoq.agreement_by_quality([1.0, -1.0, 0.5, -0.5], [1, 1, 4, 4])
    assert [r["n"] for r in rows] == [2, 0, 0, 2, 0]
    assert rows[0]["std"] == pytest.approx(1.0)
    assert rows[3]["std"] == pytest.approx(0.5)

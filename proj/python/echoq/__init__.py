"""Regional image quality metrics for apical echocardiography views."""

from ._echoq import (
    Error,
    InputError,
    InvariantError,
    ValidationError,
    agreement_by_quality,
    average_ranks,
    chamber_phantom,
    cnr,
    coherence_factor,
    contrast_phantom,
    divide_regions,
    fit_linear,
    frame_metrics,
    gamma_normalize,
    gcnr,
    histogram_match,
    psnr,
    quality_category,
    region_names,
    rpe,
    spearman,
    ssim,
    wilcoxon_signed_rank,
)

__all__ = [name for name in dir() if not name.startswith("_")]

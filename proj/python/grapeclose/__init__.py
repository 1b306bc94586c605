from ._grapeclose import (
    ArgumentError,
    EmptyMaskError,
    Error,
    FitFailure,
    FormatError,
    RangeError,
    ValidationError,
    __version__,
    average_precision,
    eval_model,
    extract_keypoints,
    fit_asymptotic,
    iqr_keep_indices,
    load_heatmap,
    miou,
    polygons_to_mask,
    rle_compress,
    rle_decode,
    rle_decompress,
    rle_encode,
    time_to_fraction,
    upsample_bilinear,
    vcc,
)


def rle_to_coco(mask):
    """Compressed COCO-style RLE dict for a 2-D mask."""
    h, w = mask.shape
    return {"size": [h, w], "counts": rle_compress(rle_encode(mask))}

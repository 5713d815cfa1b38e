"""Descriptor registry and manifest-to-dataset extraction.

Every image is resized to the working patch size (default 40x40) before a
descriptor runs, so feature lengths are fixed: the six edge maps give 1600,
hpiv 256, hog8/hog10 576/324, lbp8/lbp16/lbp32 1475/236/59.
"""

import numpy as np

from .dataset import Dataset
from .edges import EDGE_METHODS, EdgeParams, edge_features
from .errors import EmptyDatasetError
from .features import hog, hpiv, lbp
from .image import load_image, resize_bilinear
from .synth import load_manifest

PATCH_SIZE = 40

# tag -> feature length at the 40x40 working size
FEATURE_LENGTHS = {
    "canny": 1600,
    "prewitt": 1600,
    "sobel": 1600,
    "roberts": 1600,
    "log": 1600,
    "approxcanny": 1600,
    "hpiv": 256,
    "hog8": 576,
    "hog10": 324,
    "lbp8": 1475,
    "lbp16": 236,
    "lbp32": 59,
}

EDGE_TAGS = tuple(EDGE_METHODS)
STAT_TAGS = ("hpiv", "hog8", "hog10", "lbp8", "lbp16", "lbp32")
ALL_TAGS = EDGE_TAGS + STAT_TAGS


def descriptor_tag(name, cell=None):
    """Canonical tag for a descriptor name plus optional cell size."""
    name = name.lower()
    if name in EDGE_TAGS or name == "hpiv":
        return name
    if name == "hog":
        if cell not in (8, 10):
            raise ValueError("hog needs cell 8 or 10")
        return f"hog{cell}"
    if name == "lbp":
        if cell not in (8, 16, 32):
            raise ValueError("lbp needs cell 8, 16 or 32")
        return f"lbp{cell}"
    if name in ALL_TAGS:
        return name
    raise ValueError(f"unknown descriptor {name!r}; choose from {ALL_TAGS}")


def extract_one(img, tag, edge_params=None):
    """Feature vector of a single working-size patch."""
    if tag in EDGE_TAGS:
        return edge_features(img, tag, edge_params)
    if tag == "hpiv":
        return hpiv(img)
    if tag.startswith("hog"):
        return hog(img, int(tag[3:]))
    if tag.startswith("lbp"):
        return lbp(img, int(tag[3:]))
    raise ValueError(f"unknown descriptor tag {tag!r}")


def extract_matrix(images, tag, edge_params=None):
    rows = [extract_one(img, tag, edge_params) for img in images]
    if not rows:
        raise EmptyDatasetError("no images to extract from")
    return np.vstack(rows)


def load_patches(manifest_path, patch_size=PATCH_SIZE):
    """Load and resize every manifest image; returns (images, labels, ids)."""
    paths, labels = load_manifest(manifest_path)
    if not paths:
        raise EmptyDatasetError(f"{manifest_path}: empty dataset")
    images = [resize_bilinear(load_image(p), patch_size, patch_size) for p in paths]
    import os

    ids = [os.path.splitext(os.path.basename(p))[0] for p in paths]
    return images, labels, ids


def build_dataset(manifest_path, tag, edge_params=None, patch_size=PATCH_SIZE):
    """Manifest -> Dataset for one descriptor."""
    images, labels, ids = load_patches(manifest_path, patch_size)
    return Dataset(extract_matrix(images, tag, edge_params), labels, ids)

"""Core image container and file I/O.

Images are stored planar (channel-major): a float32 array of shape
(channels, height, width) with samples nominally in [0, 1].  Every kernel
in this package works on one channel at a time, so planar layout keeps the
inner loops contiguous.  Single channels ("planes") are plain 2-D float32
arrays of shape (height, width).

Supported file formats: 8-bit PNG (RGB or grayscale), binary PPM (P6) and
PGM (P5).  Nothing else.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import FormatError

_PNG_EXTS = {".png"}
_PNM_EXTS = {".ppm", ".pgm"}


@dataclass(frozen=True)
class ImageF:
    """Planar floating-point image, 1 or 3 channels, samples in [0, 1]."""

    planes: np.ndarray  # float32, shape (channels, height, width)

    def __post_init__(self):
        p = np.asarray(self.planes, dtype=np.float32)
        if p.ndim == 2:
            p = p[np.newaxis]
        if p.ndim != 3 or p.shape[0] not in (1, 3):
            raise ValueError(f"expected (1|3, H, W) planes, got shape {p.shape}")
        if p.shape[1] < 1 or p.shape[2] < 1:
            raise ValueError("image must be at least 1x1")
        p = np.ascontiguousarray(p)
        p.flags.writeable = False
        object.__setattr__(self, "planes", p)

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    def plane(self, i: int) -> np.ndarray:
        """Read-only view of channel i."""
        return self.planes[i]


def ensure_rgb(img: ImageF) -> ImageF:
    """Promote a grayscale image to 3 identical channels; pass RGB through."""
    if img.channels == 3:
        return img
    return ImageF(np.repeat(img.planes, 3, axis=0))


def clamp01(img: ImageF) -> ImageF:
    """Clamp every sample into [0, 1]; order-preserving on in-range samples."""
    return ImageF(np.clip(img.planes, 0.0, 1.0))


def from_bytes(arr: np.ndarray) -> ImageF:
    """Build an ImageF from an 8-bit array of shape (H, W) or (H, W, 3)."""
    a = np.asarray(arr, dtype=np.float32) / 255.0
    if a.ndim == 2:
        return ImageF(a[np.newaxis])
    return ImageF(np.moveaxis(a, -1, 0))


def to_bytes(img: ImageF) -> np.ndarray:
    """Clamp to [0, 1] and quantize round-to-nearest to uint8.

    Returns (H, W) for grayscale, (H, W, 3) for color.
    """
    q = np.rint(np.clip(img.planes, 0.0, 1.0) * 255.0).astype(np.uint8)
    if q.shape[0] == 1:
        return q[0]
    return np.moveaxis(q, 0, -1)


def load_image(path: str | os.PathLike) -> ImageF:
    """Load an 8-bit PNG / PPM (P6) / PGM (P5) file, scaled into [0, 1].

    Raises FormatError for unsupported or malformed files and OSError for
    I/O failures.
    """
    ext = os.path.splitext(str(path))[1].lower()
    if ext in _PNG_EXTS:
        return _load_png(path)
    if ext in _PNM_EXTS:
        return _load_pnm(path)
    raise FormatError(f"unsupported image format: {ext or '(no extension)'}")


def save_image(img: ImageF, path: str | os.PathLike) -> None:
    """Write as 8-bit PNG or PPM/PGM depending on the file extension.

    Samples are clamped to [0, 1] and rounded to the nearest 8-bit value, so
    a load after save differs from the clamped original by at most 1/510
    per sample.
    """
    ext = os.path.splitext(str(path))[1].lower()
    data = to_bytes(img)
    if ext in _PNG_EXTS:
        Image.fromarray(data).save(path, format="PNG")
        return
    if ext == ".ppm":
        _save_pnm(to_bytes(ensure_rgb(img)), path, color=True)
        return
    if ext == ".pgm":
        if img.channels != 1:
            raise FormatError("PGM stores a single channel; got a color image")
        _save_pnm(data, path, color=False)
        return
    raise FormatError(f"unsupported image format: {ext or '(no extension)'}")


def _load_png(path) -> ImageF:
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("L", "RGB"):
                pass
            elif im.mode in ("I;16", "I", "F", "LA", "RGBA", "P", "1"):
                # Only plain 8-bit gray/RGB belongs here; palette and alpha
                # variants are flattened rather than rejected.
                im = im.convert("RGB" if im.mode in ("P", "RGBA") else "L")
            else:
                raise FormatError(f"unsupported PNG mode: {im.mode}")
            return from_bytes(np.asarray(im, dtype=np.uint8))
    except FormatError:
        raise
    except Image.UnidentifiedImageError as exc:
        raise FormatError(f"not a PNG file: {path}") from exc


def _load_pnm(path) -> ImageF:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, fields, offset = _parse_pnm_header(raw, path)
    width, height, maxval = fields
    if maxval != 255:
        raise FormatError(f"only 8-bit PNM supported, maxval={maxval}")
    nchan = 3 if magic == b"P6" else 1
    need = width * height * nchan
    body = raw[offset : offset + need]
    if len(body) < need:
        raise OSError(f"truncated PNM file: {path} (expected {need} bytes, got {len(body)})")
    arr = np.frombuffer(body, dtype=np.uint8).reshape(height, width, nchan)
    return from_bytes(arr[..., 0] if nchan == 1 else arr)


def _parse_pnm_header(raw: bytes, path) -> tuple[bytes, tuple[int, int, int], int]:
    if raw[:2] not in (b"P5", b"P6"):
        raise FormatError(f"not a binary PGM/PPM file: {path}")
    magic = raw[:2]
    fields: list[int] = []
    i = 2
    while len(fields) < 3:
        while i < len(raw) and raw[i : i + 1].isspace():
            i += 1
        if i < len(raw) and raw[i : i + 1] == b"#":  # comment line
            while i < len(raw) and raw[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < len(raw) and not raw[i : i + 1].isspace():
            i += 1
        token = raw[start:i]
        if not token.isdigit():
            raise FormatError(f"malformed PNM header in {path}")
        fields.append(int(token))
    if i >= len(raw) or not raw[i : i + 1].isspace():
        raise FormatError(f"malformed PNM header in {path}")
    i += 1  # single whitespace after maxval, then raster
    w, h, maxval = fields
    if w < 1 or h < 1:
        raise FormatError(f"bad PNM dimensions {w}x{h} in {path}")
    return magic, (w, h, maxval), i


def _save_pnm(data: np.ndarray, path, color: bool) -> None:
    height, width = data.shape[:2]
    header = b"%s\n%d %d\n255\n" % (b"P6" if color else b"P5", width, height)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(data).tobytes())

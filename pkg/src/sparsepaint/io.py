"""PGM (P5) and PFM ("Pf") readers/writers.

Header grammar (documented contract, see README):

PGM:  "P5" ws W ws H ws MAXVAL single-ws  then W*H raw bytes, row-major,
      top row first.  Comments ("#" to end of line) are allowed inside the
      header whitespace.  Only MAXVAL 255 is supported.

PFM:  "Pf\n" "W H\n" SCALE "\n" then W*H little-endian float32 values,
      bottom row first (standard PFM row order).  SCALE must be negative
      (little-endian); we always write -1.0.  Values must lie in [0, 1].

Binary masks are stored as PGM with 255 = known, 0 = unknown.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError, ValidationError
from .image import BinaryMask, GrayImage, ProbMask


def _read_pgm_header(blob: bytes):
    """Parse the P5 header, returning (width, height, maxval, payload offset)."""
    if blob[:2] != b"P5":
        magic = blob[:2].decode("latin1", "replace")
        raise FormatError(f"unsupported magic {magic!r} (expected P5)")
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and comments
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("malformed header: truncated before all fields read")
        tok = blob[start:pos]
        try:
            fields.append(int(tok))
        except ValueError:
            raise FormatError(f"malformed header: non-numeric field {tok!r}") from None
    if pos >= len(blob):
        raise FormatError("malformed header: missing payload separator")
    pos += 1  # exactly one whitespace byte after maxval
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise FormatError(f"malformed header: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} (only 255)")
    return width, height, maxval, pos


def load_image(path) -> GrayImage:
    """Load an 8-bit grayscale P5 PGM file."""
    with open(path, "rb") as fh:
        blob = fh.read()
    width, height, _, pos = _read_pgm_header(blob)
    payload = blob[pos : pos + width * height]
    if len(payload) < width * height:
        raise FormatError(
            f"truncated payload: expected {width * height} bytes, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(data.astype(np.float64))


def save_image(img: GrayImage, path) -> None:
    """Write a P5 PGM; values are rounded half-up and clamped to [0, 255]."""
    rounded = np.floor(img.data + 0.5)
    bytes_ = np.clip(rounded, 0.0, 255.0).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(bytes_.tobytes())


def load_mask(path) -> BinaryMask:
    """Load a binary mask stored as PGM (255 = known, 0 = unknown)."""
    img = load_image(path)
    vals = img.data
    bad = np.flatnonzero((vals != 0.0) & (vals != 255.0))
    if bad.size:
        raise ValidationError(
            f"mask pixel must be 0 or 255, found {vals.flat[bad[0]]:g} "
            f"at index {int(bad[0])}"
        )
    return BinaryMask(vals == 255.0)


def save_mask(mask: BinaryMask, path) -> None:
    save_image(GrayImage(np.where(mask.known, 255.0, 0.0)), path)


def load_prob_mask(path) -> ProbMask:
    """Load a grayscale PFM probability mask (little-endian, values in [0,1])."""
    with open(path, "rb") as fh:
        blob = fh.read()
    try:
        nl1 = blob.index(b"\n")
        nl2 = blob.index(b"\n", nl1 + 1)
        nl3 = blob.index(b"\n", nl2 + 1)
    except ValueError:
        raise FormatError("malformed header: expected three newline-terminated lines") from None
    magic = blob[:nl1].strip()
    if magic != b"Pf":
        raise FormatError(f"unsupported magic {magic.decode('latin1', 'replace')!r} (expected Pf)")
    dims = blob[nl1 + 1 : nl2].split()
    if len(dims) != 2:
        raise FormatError("malformed header: dimension line must hold width and height")
    try:
        width, height = int(dims[0]), int(dims[1])
        scale = float(blob[nl2 + 1 : nl3])
    except ValueError:
        raise FormatError("malformed header: non-numeric dimension or scale") from None
    if scale >= 0.0:
        raise FormatError("unsupported byte order: positive scale means big-endian")
    payload = blob[nl3 + 1 :]
    expected = width * height * 4
    if len(payload) < expected:
        raise FormatError(
            f"truncated payload: expected {expected} bytes, got {len(payload)}"
        )
    flat = np.frombuffer(payload[:expected], dtype="<f4").reshape(height, width)
    data = flat[::-1, :]  # PFM rows are stored bottom-up
    bad = np.flatnonzero((data < 0.0) | (data > 1.0) | ~np.isfinite(data))
    if bad.size:
        raise ValidationError(
            f"confidence value out of [0,1] at index {int(bad[0])}"
        )
    return ProbMask(data.astype(np.float64))


def save_prob_mask(mask: ProbMask, path) -> None:
    """Write a grayscale PFM (scale -1.0, little-endian, bottom row first)."""
    header = f"Pf\n{mask.width} {mask.height}\n-1.0\n".encode("ascii")
    payload = mask.prob[::-1, :].astype("<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)

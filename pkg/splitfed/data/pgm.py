import logging
import os
from typing import Tuple

import numpy as np

from .sample import Sample, Dataset
from ..utils.exception import DataFormatError

log = logging.getLogger(__name__)


def _header(data: bytes) -> Tuple[int, int, int, int]:
    """Parses a binary PGM header.

    Returns:
        Tuple of width, height, maxval and offset of first pixel byte.
    """
    if data[:2] != b'P5':
        raise DataFormatError('Not a binary PGM (P5) file.', offset=0, magic=data[:2])

    # read three integer tokens, skipping whitespace and comments
    values, pos = [], 2
    while len(values) < 3:
        if pos >= len(data):
            raise DataFormatError('Unexpected end of header.', offset=pos)
        c = data[pos:pos + 1]
        if c.isspace():
            pos += 1
        elif c == b'#':
            end = data.find(b'\n', pos)
            pos = len(data) if end < 0 else end + 1
        elif c.isdigit():
            start = pos
            while pos < len(data) and data[pos:pos + 1].isdigit():
                pos += 1
            values.append(int(data[start:pos]))
        else:
            raise DataFormatError('Invalid character in header.', offset=pos, char=c)

    # exactly one whitespace before raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise DataFormatError('Missing whitespace after header.', offset=pos)
    width, height, maxval = values
    if width < 1 or height < 1:
        raise DataFormatError('Invalid image size.', offset=pos, width=width, height=height)
    if not 1 <= maxval <= 255:
        raise DataFormatError('Only 8-bit PGM files are supported.', offset=pos, maxval=maxval)
    return width, height, maxval, pos + 1


def decode_pgm(data: bytes) -> Tuple[np.ndarray, int]:
    """Decodes a binary PGM.

    Args:
        data: File content.

    Returns:
        Tuple of H x W uint8 raster and maxval.

    Raises:
        DataFormatError: On malformed header, truncated raster or values above maxval, with byte offset.
    """
    width, height, maxval, offset = _header(data)
    if len(data) - offset < width * height:
        raise DataFormatError('Raster is truncated.', offset=len(data), expected=offset + width * height)
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=offset)
    bad = np.flatnonzero(raster > maxval)
    if len(bad) > 0:
        raise DataFormatError('Value exceeds maxval.', offset=offset + int(bad[0]), value=int(raster[bad[0]]),
                              maxval=maxval)
    return raster.reshape(height, width).copy(), maxval


def encode_pgm(raster: np.ndarray, maxval: int = 255) -> bytes:
    """Encodes a H x W array of integers in [0, maxval] as binary PGM."""
    raster = np.asarray(raster)
    if raster.ndim != 2 or raster.min() < 0 or raster.max() > maxval:
        raise DataFormatError('Raster must be 2D with values in [0, maxval].', shape=raster.shape, maxval=maxval)
    header = b'P5\n%d %d\n%d\n' % (raster.shape[1], raster.shape[0], maxval)
    return header + raster.astype(np.uint8).tobytes()


def read_pgm(filename: str) -> Tuple[np.ndarray, int]:
    """Reads a binary PGM file, see decode_pgm()."""
    with open(filename, 'rb') as f:
        data = f.read()
    try:
        return decode_pgm(data)
    except DataFormatError as e:
        raise DataFormatError(e.message, path=filename, **e.context)


def write_pgm(filename: str, raster: np.ndarray, maxval: int = 255):
    with open(filename, 'wb') as f:
        f.write(encode_pgm(raster, maxval))


def write_dataset(dataset: Dataset, path: str, num_classes: int = 5):
    """Writes a dataset as images/NNNN.pgm, masks/NNNN.pgm and manifest.txt.

    Args:
        dataset: Dataset to write.
        path: Output directory, created if necessary.
        num_classes: Number of classes, masks are written with maxval num_classes - 1.
    """
    os.makedirs(os.path.join(path, 'images'), exist_ok=True)
    os.makedirs(os.path.join(path, 'masks'), exist_ok=True)
    ids = []
    for i, sample in enumerate(dataset):
        sid = sample.sample_id if sample.sample_id is not None else '%04d' % i
        image = np.round(np.clip(sample.image, 0., 1.) * 255.).astype(np.uint8)
        write_pgm(os.path.join(path, 'images', sid + '.pgm'), image)
        write_pgm(os.path.join(path, 'masks', sid + '.pgm'), sample.mask, maxval=num_classes - 1)
        ids.append(sid)
    with open(os.path.join(path, 'manifest.txt'), 'w') as f:
        f.write(''.join(sid + '\n' for sid in ids))
    log.info('Wrote %d samples to %s.', len(ids), path)


def read_dataset(path: str) -> Dataset:
    """Reads a dataset written by write_dataset().

    Args:
        path: Dataset directory.

    Returns:
        Dataset in manifest order, images scaled to [0, 1].

    Raises:
        DataFormatError: On missing or malformed files, with path.
    """
    manifest = os.path.join(path, 'manifest.txt')
    if not os.path.exists(manifest):
        raise DataFormatError('Manifest not found.', path=manifest)
    with open(manifest, 'r') as f:
        ids = [line.strip() for line in f if line.strip()]

    # read samples
    samples = []
    for sid in ids:
        files = [os.path.join(path, sub, sid + '.pgm') for sub in ('images', 'masks')]
        for filename in files:
            if not os.path.exists(filename):
                raise DataFormatError('Sample file not found.', path=filename)
        image, maxval = read_pgm(files[0])
        mask, _ = read_pgm(files[1])
        samples.append(Sample((image / float(maxval)).astype(np.float32), mask, sample_id=sid))
    log.info('Read %d samples from %s.', len(samples), path)
    return Dataset(samples)


__all__ = ['decode_pgm', 'encode_pgm', 'read_pgm', 'write_pgm', 'write_dataset', 'read_dataset']

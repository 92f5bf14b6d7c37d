import numpy as np
import pytest

from splitfed.data import decode_pgm, encode_pgm, read_dataset, write_dataset
from splitfed.utils.exception import DataFormatError


class TestPGM(object):
    def test_decode(self):
        """Header with comment and odd whitespace."""
        data = b'P5\n# made by hand\n3  2\n255\n' + bytes([0, 1, 2, 3, 4, 255])
        raster, maxval = decode_pgm(data)
        assert maxval == 255
        assert np.array_equal(raster, [[0, 1, 2], [3, 4, 255]])

    def test_encode(self):
        raster = np.array([[0, 4], [2, 1]], dtype=np.uint8)
        assert encode_pgm(raster, maxval=4) == b'P5\n2 2\n4\n' + bytes([0, 4, 2, 1])

    def test_ascii_rejected(self):
        with pytest.raises(DataFormatError) as exc:
            decode_pgm(b'P2\n2 2\n255\n0 1 2 3\n')
        assert exc.value.offset == 0

    def test_value_above_maxval(self):
        """Error reports byte offset of the offending pixel."""
        header = b'P5\n2 2\n4\n'
        with pytest.raises(DataFormatError) as exc:
            decode_pgm(header + bytes([0, 1, 9, 2]))
        assert exc.value.offset == len(header) + 2
        assert exc.value.value == 9

    def test_truncated(self):
        with pytest.raises(DataFormatError):
            decode_pgm(b'P5\n4 4\n255\n' + bytes(10))

    def test_sixteen_bit(self):
        with pytest.raises(DataFormatError):
            decode_pgm(b'P5\n1 1\n65535\n' + bytes(2))


class TestDatasetFiles(object):
    def test_write_read(self, dataset, tmp_path):
        """Masks survive exactly, images up to quantization."""
        write_dataset(dataset, str(tmp_path))
        back = read_dataset(str(tmp_path))
        assert back.ids == dataset.ids
        for a, b in zip(dataset, back):
            assert np.array_equal(a.mask, b.mask)
            assert np.abs(a.image - b.image).max() <= 0.5 / 255 + 1e-6

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DataFormatError):
            read_dataset(str(tmp_path))

    def test_missing_file(self, dataset, tmp_path):
        write_dataset(dataset.subset([0, 1]), str(tmp_path))
        (tmp_path / 'masks' / '0001.pgm').unlink()
        with pytest.raises(DataFormatError) as exc:
            read_dataset(str(tmp_path))
        assert '0001' in exc.value.path

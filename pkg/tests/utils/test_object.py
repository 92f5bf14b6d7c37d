import logging

import pytest

from splitfed.aggregation import Aggregator, FedNCLv2
from splitfed.object import create_object, get_class_from_string, splitfedObject
from splitfed.utils.exception import ConfigError, ShapeError, splitfedException


class TestObject(object):
    def test_create(self):
        log = logging.getLogger('test')
        obj = create_object({'class': 'splitfed.aggregation.FedNCLv2', 'beta': 0.5}, log=log)
        assert isinstance(obj, FedNCLv2)
        assert obj.beta == 0.5
        assert obj.log is log

    def test_missing_class(self):
        with pytest.raises(ConfigError):
            create_object({'beta': 1.})
        with pytest.raises(ConfigError):
            get_class_from_string('splitfed.aggregation.Nope')
        with pytest.raises(ConfigError):
            get_class_from_string('FedAvg')

    def test_wrong_type(self):
        obj = create_object({'class': 'splitfed.object.splitfedObject'})
        assert type(obj) is splitfedObject
        with pytest.raises(ConfigError):
            create_object({'class': 'splitfed.object.splitfedObject'}, klass=Aggregator)


class TestException(object):
    def test_context(self):
        """Context becomes attributes and shows up in the message."""
        e = ShapeError('Mismatch.', input=(1, 2), kernel=(3, 4))
        assert e.input == (1, 2)
        assert str(e) == 'Mismatch. (input=(1, 2), kernel=(3, 4))'
        assert isinstance(e, ValueError) and isinstance(e, splitfedException)
        assert str(ShapeError('Plain.')) == 'Plain.'

import importlib
import logging
import typing

from .utils.exception import ConfigError


class splitfedObject(object):
    """Base class for all configurable objects in splitfed."""

    def __init__(self, objects: dict = None, log: logging.Logger = None, *args, **kwargs):
        """Initializes a new object.

        Args:
            objects: Dictionary containing other objects.
            log: Logging instance to use.
        """
        self.objects = {} if objects is None else objects
        self._log = log

    @property
    def log(self) -> logging.Logger:
        """Get logger for this object.

        Returns:
            Logger to use for this object.
        """
        return self._log if self._log is not None else logging.getLogger()


def get_class_from_string(class_name: str) -> typing.Type:
    """Take a class name as a string and return the actual class

    Args:
        class_name: Fully qualified name of class, e.g. splitfed.aggregation.FedAvg.

    Returns:
        Actual class.

    Raises:
        ConfigError: If module or class cannot be found.
    """

    # split parts of class name, i.e. module and class
    module_name, _, cls_name = class_name.rpartition('.')
    if not module_name:
        raise ConfigError('Class name must contain a module path.', key='class', value=class_name)

    # import module and fetch class
    try:
        module = importlib.import_module(module_name)
        return getattr(module, cls_name)
    except (ImportError, AttributeError):
        raise ConfigError('Could not find class.', key='class', value=class_name)


def create_object(config: dict, log: logging.Logger = None, klass: typing.Type = None, *args, **kwargs) \
        -> splitfedObject:
    """Create a new object from a dict.

    Args:
        config: Dictionary with a "class" element to create object from.
        log: Logger to use for new object.
        klass: If given, class the new object must be an instance of.

    Returns:
        New object created from config.

    Raises:
        ConfigError: If no usable class is given.
    """

    # copy config
    cfg = dict(config)

    # get class name
    class_name = cfg.pop('class', None)
    if class_name is None:
        raise ConfigError('No class name given.', key='class')

    # create class
    cls = get_class_from_string(class_name)

    # create object and check type
    obj = cls(*args, **kwargs, **cfg, log=log)
    if klass is not None and not isinstance(obj, klass):
        raise ConfigError('Object is of wrong type, should be %s.' % klass.__name__, key='class', value=class_name)
    return obj


__all__ = ['splitfedObject', 'create_object', 'get_class_from_string']

import copy
from collections import OrderedDict
from typing import Any, Dict, IO, Union

import yaml

from ..aggregation import AggregatorSpec
from ..model import UNetSpec, SplitSpec
from ..utils.exception import ConfigError

# sections, keys, types and defaults of a config file
SCHEMA = OrderedDict([
    ('model', OrderedDict([('levels', (int, 2)), ('base_channels', (int, 8)), ('num_classes', (int, 5))])),
    ('split', OrderedDict([('depth', (str, None))])),
    ('aggregator', OrderedDict([('kind', (str, None)), ('class', (str, None)), ('beta', (float, 1.0)),
                                ('lam', (float, 0.1)), ('eta', (float, 0.1)), ('iterations', (int, 3))])),
    ('channel', OrderedDict([('p_loss', (float, 0.0)), ('n_lossy_clients', (int, 0))])),
    ('training', OrderedDict([('mode', (str, 'splitfed')), ('local_epochs', (int, 12)),
                              ('global_epochs', (int, 15)), ('batch_size', (int, 4)), ('lr', (float, 1e-4)),
                              ('runs', (int, 10)), ('seed', (int, 0)),
                              ('proportions', (list, [0.30, 0.25, 0.20, 0.15, 0.10])),
                              ('val_fraction', (float, 0.15))])),
    ('data', OrderedDict([('path', (str, None)), ('n', (int, 470)), ('size', (int, 64)),
                          ('image_size', (int, 64)), ('n_test', (int, 70)), ('seed', (int, 0))])),
    ('output', OrderedDict([('csv', (str, 'splitfed.csv')), ('log', (str, 'splitfed.log'))])),
])

MODES = ('splitfed', 'centralized')


def _check_type(key: str, value: Any, typ: type, line: int = None) -> Any:
    if value is None:
        return None
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if typ is int and isinstance(value, bool) or not isinstance(value, typ):
        raise ConfigError('Wrong type, expected %s.' % typ.__name__, key=key, value=value, line=line)
    if typ is list:
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ConfigError('Expected a list of numbers.', key=key, value=value, line=line)
        return [float(v) for v in value]
    return value


class ExperimentConfig(object):
    """All settings of an experiment, one value per key of the config file.

    Values are stored in a nested dict mirroring the file's sections. Lines of keys read from a file are kept,
    so that later validation errors can point to them.
    """

    def __init__(self, values: Dict[str, Dict[str, Any]] = None, lines: Dict[str, int] = None):
        """Initializes a new config.

        Args:
            values: Values by section and key; missing ones get their defaults.
            lines: 1-based line numbers by "section.key".

        Raises:
            ConfigError: On unknown keys, wrong types or invalid values.
        """
        self.lines = {} if lines is None else dict(lines)
        self.values = OrderedDict()

        # check sections and keys, fill defaults
        values = {} if values is None else values
        for section in values:
            if section not in SCHEMA:
                raise ConfigError('Unknown section.', key=section, line=self.lines.get(section))
            if not isinstance(values[section], dict):
                raise ConfigError('Section must be a mapping.', key=section, line=self.lines.get(section))
            for key in values[section]:
                if key not in SCHEMA[section]:
                    raise ConfigError('Unknown key.', key='%s.%s' % (section, key),
                                      line=self.lines.get('%s.%s' % (section, key)))
        for section, keys in SCHEMA.items():
            self.values[section] = OrderedDict()
            for key, (typ, default) in keys.items():
                name = '%s.%s' % (section, key)
                value = values.get(section, {}).get(key, copy.copy(default))
                self.values[section][key] = _check_type(name, value, typ, self.lines.get(name))

        self.validate()

    def __getitem__(self, name: str) -> Any:
        """Returns a value by "section.key"."""
        section, key = name.split('.')
        return self.values[section][key]

    def replace(self, **overrides) -> 'ExperimentConfig':
        """Returns a new config with some values replaced.

        Args:
            overrides: New values by "section__key", e.g. channel__p_loss=0.5.

        Returns:
            New config.
        """
        values = copy.deepcopy(self.values)
        for name, value in overrides.items():
            section, key = name.split('__')
            if section not in SCHEMA or key not in SCHEMA[section]:
                raise ConfigError('Unknown key.', key='%s.%s' % (section, key))
            values[section][key] = value
        return ExperimentConfig(values, lines=self.lines)

    def _fail(self, message: str, name: str, value: Any = None):
        raise ConfigError(message, key=name, value=value, line=self.lines.get(name))

    def validate(self):
        """Checks values and dependencies between them.

        Raises:
            ConfigError: Naming key and line of the first invalid value.
        """
        v = self.values

        # mode and required keys
        if v['training']['mode'] not in MODES:
            self._fail('Unknown training mode.', 'training.mode', v['training']['mode'])
        if self.mode == 'splitfed':
            if v['split']['depth'] is None:
                self._fail('Missing required key.', 'split.depth')
            if v['split']['depth'] not in SplitSpec.DEPTHS:
                self._fail('Unknown split depth.', 'split.depth', v['split']['depth'])
            if v['aggregator']['kind'] is None and v['aggregator']['class'] is None:
                self._fail('Missing required key, either kind or class.', 'aggregator.kind')

        # positive integers
        for name in ['model.levels', 'model.base_channels', 'model.num_classes', 'training.local_epochs',
                     'training.global_epochs', 'training.batch_size', 'training.runs', 'data.n', 'data.size',
                     'data.image_size']:
            if self[name] < 1:
                self._fail('Value must be positive.', name, self[name])
        for name in ['data.size', 'data.image_size']:
            if self[name] % 2 ** self['model.levels']:
                self._fail('Image size must be divisible by 2**levels.', name, self[name])
        if self['training.seed'] < 0 or self['data.seed'] < 0:
            self._fail('Seeds must not be negative.', 'training.seed' if self['training.seed'] < 0 else 'data.seed')

        # ranges
        if not 0. <= self['channel.p_loss'] <= 1.:
            self._fail('Loss probability must be within [0, 1].', 'channel.p_loss', self['channel.p_loss'])
        if self['training.lr'] <= 0:
            self._fail('Learning rate must be positive.', 'training.lr', self['training.lr'])
        if not 0. <= self['training.val_fraction'] < 1.:
            self._fail('Validation fraction must be within [0, 1).', 'training.val_fraction',
                       self['training.val_fraction'])
        if not 0 <= self['data.n_test'] < self['data.n']:
            self._fail('Test set must be smaller than the dataset.', 'data.n_test', self['data.n_test'])

        # clients
        proportions = self['training.proportions']
        if len(proportions) < 1 or any(p <= 0 for p in proportions):
            self._fail('Proportions must be positive.', 'training.proportions', proportions)
        if abs(sum(proportions) - 1.) > 1e-9:
            self._fail('Proportions must sum to 1.', 'training.proportions', proportions)
        if not 0 <= self['channel.n_lossy_clients'] <= len(proportions):
            self._fail('Number of lossy clients must be between 0 and the number of clients.',
                       'channel.n_lossy_clients', self['channel.n_lossy_clients'])

        # aggregator parameters
        if self.mode == 'splitfed':
            try:
                self.aggregator
            except ConfigError as e:
                self._fail(e.message, 'aggregator.%s' % e.context.get('key', 'kind'), e.context.get('value'))

    @property
    def mode(self) -> str:
        return self['training.mode']

    @property
    def unet(self) -> UNetSpec:
        m = self.values['model']
        return UNetSpec(levels=m['levels'], base_channels=m['base_channels'], num_classes=m['num_classes'])

    @property
    def split(self) -> SplitSpec:
        return SplitSpec(self['split.depth'])

    @property
    def aggregator(self) -> AggregatorSpec:
        a = self.values['aggregator']
        return AggregatorSpec(kind=a['kind'] if a['kind'] is not None else 'custom', beta=a['beta'],
                              lam=a['lam'], eta=a['eta'], iterations=a['iterations'], cls=a['class'])

    @property
    def aggregator_label(self) -> str:
        """Name of aggregator for output files."""
        if self.mode == 'centralized':
            return 'none'
        return self['aggregator.kind'] if self['aggregator.kind'] is not None else self['aggregator.class']

    @property
    def split_label(self) -> str:
        return 'centralized' if self.mode == 'centralized' else self['split.depth']

    @property
    def n_clients(self) -> int:
        return len(self['training.proportions'])

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        return copy.deepcopy(self.values)

    def __repr__(self):
        return 'ExperimentConfig(%s)' % dict((s, dict(k)) for s, k in self.values.items())


def _lines(node: yaml.Node) -> Dict[str, int]:
    """Collects 1-based lines of all sections and keys in a composed YAML document."""
    lines = {}
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError('Config must be a mapping of sections.', line=node.start_mark.line + 1)
    for key_node, value_node in node.value:
        section = key_node.value
        lines[section] = key_node.start_mark.line + 1
        if isinstance(value_node, yaml.MappingNode):
            for sub_key, _ in value_node.value:
                lines['%s.%s' % (section, sub_key.value)] = sub_key.start_mark.line + 1
    return lines


def load_config(source: Union[str, IO]) -> ExperimentConfig:
    """Reads a YAML config file.

    Args:
        source: Filename or open file.

    Returns:
        Validated config.

    Raises:
        ConfigError: On syntax errors, unknown keys and invalid values, naming key and line.
    """

    # read text
    if isinstance(source, str):
        try:
            with open(source, 'r') as f:
                text = f.read()
        except OSError as e:
            raise ConfigError('Could not read config file.', path=source, reason=e.strerror)
    else:
        text = source.read()

    # parse
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        values = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise ConfigError('Invalid YAML: %s.' % e.problem, line=line)

    # empty file gives defaults
    if node is None:
        return ExperimentConfig()
    lines = _lines(node)
    if not isinstance(values, dict):
        raise ConfigError('Config must be a mapping of sections.', line=1)
    for section, value in values.items():
        if value is None:
            values[section] = {}
    return ExperimentConfig(values, lines=lines)


__all__ = ['ExperimentConfig', 'load_config', 'SCHEMA']

class splitfedException(Exception):
    """Base class for all structured errors raised by splitfed.

    Keyword arguments passed to the constructor are kept as attributes and appended to the message, so that
    e.g. a ShapeError knows both shapes and a ConfigError knows the offending key and line.
    """

    def __init__(self, message: str = "", **context):
        self.message = message
        self.context = context
        for key, value in context.items():
            setattr(self, key, value)
        Exception.__init__(self, str(self))

    def __str__(self):
        if not self.context:
            return self.message
        details = ', '.join('%s=%s' % (k, v) for k, v in self.context.items())
        return '%s (%s)' % (self.message, details)


class ShapeError(splitfedException, ValueError):
    pass


class GraphError(splitfedException):
    pass


class ChannelError(splitfedException, ValueError):
    pass


class AggregationError(splitfedException, ValueError):
    pass


class DataFormatError(splitfedException, ValueError):
    pass


class ConfigError(splitfedException, ValueError):
    pass


class TrainingError(splitfedException):
    pass


class StatsError(splitfedException, ValueError):
    pass

import re

from .errors import UnknownNameError

__all__ = ['Registry']

_name_pattern = re.compile("^[a-z0-9-]{3,}$")


class Registry(object):
    """Named-class registry. One instance per kind of plugin
    (environments, reward families, operator designs).

    >>> ENVIRONMENTS = Registry('environment', '__env_name__')
    >>> @ENVIRONMENTS.name('my-grid')
    >>> class MyGrid(Environment):
    >>>   pass
    >>>
    >>> ENVIRONMENTS.get('my-grid') is MyGrid
    True

    """

    def __init__(self, kind, attribute):
        super(Registry, self).__init__()
        self._kind = kind
        self._attribute = attribute
        self._classes = {}

    @property
    def kind(self):
        return self._kind

    def name(self, name):
        """Returns a class decorator that stores `name` on the class and
        registers it."""

        if not isinstance(name, str):
            raise TypeError(
                "Parameter 'name' should be a string instead of {got_type}.".format(
                    got_type=type(name).__name__))

        if not _name_pattern.match(name):
            raise ValueError(
                "Parameter 'name' can't be '{name}'. "
                "It should match the following pattern: {pattern}".format(
                    name=name,
                    pattern=_name_pattern.pattern))

        def decorator(klass):
            if not isinstance(klass, type):
                raise TypeError(
                    "The {kind} name decorator should be applied to a class "
                    "instead of {got_type}.".format(
                        kind=self._kind,
                        got_type=type(klass).__name__))
            setattr(klass, self._attribute, name)
            self._classes[name] = klass
            return klass

        return decorator

    def get_name(self, cls):
        """Returns the registered name of the given class or instance, or None"""
        if not isinstance(cls, type):
            cls = type(cls)
        return getattr(cls, self._attribute, None)

    def names(self):
        return sorted(self._classes.keys())

    def get(self, name):
        try:
            return self._classes[name]
        except KeyError:
            raise UnknownNameError(self._kind, name, self.names())

    def create(self, name, *args, **kwargs):
        return self.get(name)(*args, **kwargs)

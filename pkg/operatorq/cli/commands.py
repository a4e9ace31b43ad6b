import re

__all__ = ['argument', 'command', 'getcommand', 'getcommands']

_command_name_pattern = re.compile("^[a-z0-9-]{3,}$")


class _Command(object):
    """What the @command decorator records on a method: the subcommand
    name, the parser keyword arguments and the argument specs."""

    def __init__(self, method_name, name, kwargs, arguments):
        for param, value, expected in [('method_name', method_name, str), ('name', name, str),
                                       ('kwargs', kwargs, dict), ('arguments', arguments, list)]:
            if not isinstance(value, expected):
                raise TypeError(
                    "Parameter '{param}' should be a {expected} instead of {got}.".format(
                        param=param, expected=expected.__name__, got=type(value).__name__))
        if not _command_name_pattern.match(name):
            raise ValueError("Invalid command name '{}'. Wrong format.".format(name))
        self.method_name = method_name
        self.name = name
        self.kwargs = kwargs
        self.arguments = arguments

    def add_to(self, subparsers):
        subparser = subparsers.add_parser(self.name, **self.kwargs)
        for args, kwargs in self.arguments:
            subparser.add_argument(*args, **kwargs)
        subparser.set_defaults(command=self)
        return subparser

    def __call__(self, target, *args, **kwargs):
        method = getattr(target, self.method_name, None)
        if method is None or not callable(method):
            raise AttributeError(
                "Can't call command '{name}': {cls} has no method {method_name}.".format(
                    name=self.name, cls=type(target).__name__, method_name=self.method_name))
        return method(*args, **kwargs)

    def __repr__(self):
        return "_Command({!r})".format(self.name)


def argument(*args, **kwargs):
    """Packs add_argument() parameters for the command decorator."""
    return (list(args), kwargs)


def command(*args, **kwargs):
    """Exposes a method as a subcommand. The name defaults to the method
    name with dashes, the description to its docstring."""

    def decorator(func):
        if not callable(func):
            raise TypeError(
                "Decorator @{} should be added to a method instead of {}.".format(
                    command.__name__, type(func).__name__))
        name = kwargs.pop('name', None) or func.__name__.lower().replace('_', '-')
        kwargs.setdefault('description', func.__doc__)
        kwargs.setdefault('help', kwargs['description'])
        func.__command__ = _Command(func.__name__, name, kwargs, list(args))
        return func

    return decorator


def getcommand(cls, name):
    """The command called `name` on `cls` or one of its bases, or None."""
    if not isinstance(cls, type):
        raise TypeError("Parameter 'cls' should be a class instead of {}.".format(type(cls).__name__))
    if not isinstance(name, str):
        raise TypeError("Parameter 'name' should be a str instead of {}.".format(type(name).__name__))
    return getattr(getattr(cls, name.lower().replace('-', '_'), None), '__command__', None)


def getcommands(cls, *names):
    """Every command of `cls`, optionally restricted to `names`, in name order."""
    found = []
    for member in dir(cls):
        cmd = getcommand(cls, member)
        if cmd is not None and (not names or cmd.name in names):
            found.append(cmd)
    return sorted(found, key=lambda cmd: cmd.name)

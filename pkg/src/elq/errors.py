"""Exception types raised across the engine."""


class ElqError(Exception):
    """Base class for every error raised by this package."""


class MalformedMarkup(ElqError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} at line {line}, col {col}")
        self.line = line
        self.col = col


class VoidWithChildren(ElqError):
    def __init__(self, tag, line=None, col=None):
        super().__init__(f"void element <{tag}> cannot have children")
        self.tag = tag
        self.line = line
        self.col = col


class UnknownElement(ElqError, KeyError):
    def __init__(self, element):
        super().__init__(f"unknown element {element!r}")
        self.element = element

    def __str__(self):
        return self.args[0]


class VoidParent(ElqError):
    pass


class EmptySubtree(ElqError):
    pass


class CssSyntaxError(ElqError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} at line {line}, col {col}")
        self.line = line
        self.col = col


class UnsupportedProperty(ElqError):
    def __init__(self, name):
        super().__init__(f"unsupported property {name!r}")
        self.name = name


class MediaQueryPresent(ElqError):
    pass


class DisplayNone(ElqError):
    def __init__(self, element):
        super().__init__(f"element {element} is not part of the layout")
        self.element = element


class NegativeLevel(ElqError, ValueError):
    pass


class BatchJobFailed(ElqError):
    def __init__(self, level, index, cause):
        super().__init__(f"batch job {index} at level {level} failed: {cause!r}")
        self.level = level
        self.index = index
        self.cause = cause


class VoidTarget(ElqError):
    pass


class AlreadyInstalled(ElqError):
    pass


class NotInstalled(ElqError):
    pass


class DuplicatePlugin(ElqError):
    pass


class IncompatiblePlugin(ElqError):
    pass


class PluginHookFailed(ElqError):
    def __init__(self, name, hook, cause):
        super().__init__(f"plugin {name!r} failed in {hook}: {cause!r}")
        self.name = name
        self.hook = hook
        self.cause = cause


class NotActivated(ElqError):
    pass


class BadBreakpointToken(ElqError, ValueError):
    def __init__(self, token):
        super().__init__(f"bad breakpoint token {token!r}")
        self.token = token


class BadColumnClass(ElqError, ValueError):
    def __init__(self, token):
        super().__init__(f"bad grid column class {token!r}")
        self.token = token


class NonQuiescent(ElqError):
    pass


class ScenarioError(ElqError):
    pass

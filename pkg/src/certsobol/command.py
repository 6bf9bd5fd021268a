"""Command decorators and metadata.

A subcommand of the application is a ``do_*`` method decorated with
:func:`auto_argument`, which builds its parser from the method signature.
"""

from argparse import ArgumentParser, Namespace
from functools import partial, update_wrapper
from types import MethodType
from typing import TYPE_CHECKING, Any, Callable, Generic, NamedTuple, Optional, TypeVar, Union, overload

from rich_argparse import RichHelpFormatter
from typing_extensions import Concatenate, ParamSpec, Self

from .argument import build_parser, invoke_from_ns

if TYPE_CHECKING:
    from .core import BaseApp


_P = ParamSpec("_P")
_P_Method = ParamSpec("_P_Method")
_T = TypeVar("_T")


class CommandInfo(NamedTuple):
    name: str
    cmd_func: Callable[[Namespace], Any]
    argparser: ArgumentParser
    help: Optional[str] = None
    hidden: bool = False


class Command(Generic[_P, _T]):
    """Wrapper adding a parser and a command name to a ``do_*`` method.

    Usually created through :func:`auto_argument` rather than directly.
    """

    def __init__(
        self,
        func: Callable[_P, _T],
        *,
        cmd_name: Optional[str] = None,
        parser: Optional[ArgumentParser] = None,
        parser_factory: Optional[Callable[[], ArgumentParser]] = None,
        hidden: bool = False,
    ) -> None:
        update_wrapper(self, func)
        self.__func__ = func
        if parser is None:
            if parser_factory is None:
                parser_factory = partial(
                    ArgumentParser,
                    prog=cmd_name or func.__name__,
                    description=func.__doc__,
                    formatter_class=RichHelpFormatter,
                    add_help=False,
                )
            parser = build_parser(
                MethodType(self.__func__, object()),
                parser_factory=parser_factory,
            )
        self.cmd_name = cmd_name
        self.parser = parser
        self.parser.set_defaults(__cmd_ins__=self)
        self.hidden = hidden

    def invoke_from_ns(self, app: "BaseApp", ns: Namespace) -> Any:
        """Call the wrapped method on ``app`` with arguments taken from ``ns``."""
        return invoke_from_ns(MethodType(self.__func__, app), ns)

    @overload
    def __get__(self, instance: None, owner: Optional[type]) -> Self: ...

    @overload
    def __get__(
        self: "Command[Concatenate[Any, _P_Method], _T]", instance: object, owner: Optional[type]
    ) -> Callable[_P_Method, _T]: ...

    def __get__(self, instance: Optional[object], owner: Optional[type]) -> Callable[..., _T]:
        """Bind like a plain method when accessed through an instance."""
        if instance is None:
            return self
        return self.__func__.__get__(instance, owner)

    def __cmd_info__(self, app: "BaseApp") -> CommandInfo:
        """Command information for ``app``; the name defaults to the method name without its prefix.

        :param app: The application this command belongs to
        :type app: "BaseApp"
        :rtype: CommandInfo
        """
        if self.cmd_name:
            cmd_name = self.cmd_name
        else:
            assert self.__func__.__name__.startswith(app.COMMAND_FUNC_PREFIX), f"{self.__func__} is not a command function"
            cmd_name = self.__func__.__name__[len(app.COMMAND_FUNC_PREFIX) :]
        summary = (self.parser.description or "").strip().splitlines()
        return CommandInfo(
            name=cmd_name,
            cmd_func=partial(self.invoke_from_ns, app),
            argparser=self.parser,
            help=summary[0] if summary else None,
            hidden=self.hidden,
        )

    def __call__(self, *args: _P.args, **kwargs: _P.kwargs) -> _T:
        return self.__func__(*args, **kwargs)

    def __repr__(self) -> str:
        return f"<Command(name={self.cmd_name!r}, func={self.__func__.__name__}, hidden={self.hidden})>"


@overload
def auto_argument(
    func: Callable[_P, _T],
    *,
    parser: Optional[ArgumentParser] = None,
    parser_factory: Optional[Callable[..., ArgumentParser]] = None,
    hidden: bool = False,
) -> Command[_P, _T]:
    """Turn a method into a command whose parser is built from its signature.

    :param func: Function to decorate
    :type func: Callable[_P, _T]
    :param parser: Optional ArgumentParser to use (default: auto-generated)
    :type parser: Optional[ArgumentParser]
    :param parser_factory: Factory function for creating ArgumentParser instances
    :type parser_factory: Optional[Callable[..., ArgumentParser]]
    :param hidden: Whether to hide the command from the help listing
    :type hidden: bool
    :rtype: Command[_P, _T]
    """


@overload
def auto_argument(
    func: Optional[str] = None,
    *,
    parser: Optional[ArgumentParser] = None,
    parser_factory: Optional[Callable[..., ArgumentParser]] = None,
    hidden: bool = False,
) -> Callable[[Callable[_P, _T]], Command[_P, _T]]:
    """Decorator factory form; a string first argument sets the command name (e.g. ``"compare-full"``).

    :rtype: Callable[[Callable[_P, _T]], Command[_P, _T]]
    """


def auto_argument(
    func: Union[Callable[_P, _T], str, None] = None, **kwds: Any
) -> Union[Command[_P, _T], Callable[[Callable[_P, _T]], Command[_P, _T]]]:
    name = func if isinstance(func, str) else None

    def inner(func: Callable[_P, _T]) -> Command[_P, _T]:
        if isinstance(func, Command):  # pragma: no cover
            raise TypeError("auto_argument cannot be used with Command instances directly")
        return Command(func, cmd_name=name, **kwds)

    if callable(func):
        return inner(func)
    else:
        return inner

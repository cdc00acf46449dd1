"""Lexical scanner turning Solidity-like source or a JSON ABI into a
``ContractDescriptor``.

The scanner never builds an AST. Source text is tokenized with comments and
string literals removed, declarations are recognized by token patterns, and
storage hints come from the regex rules in the detection rules file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Iterable

from . import resources
from .errors import UnparsableInput
from .features import (
    ContractDescriptor,
    DetectionRules,
    EventSig,
    FunctionSig,
    load_rules,
)
from .selectors import interface_id

_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER = re.compile(r"0[xX][0-9a-fA-F_]+|\d[\d_]*(?:\.\d+)?(?:[eE]-?\d+)?")
_SPACE = re.compile(r"\s+")
_OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>", "=>", "++", "--", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=",
    "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "**", "->", ":=",
)
_PUNCT = set("{}()[];,.=<>+-*/%!~?:&|^")
_INTERFACE_HEX = re.compile(r"^0[xX][0-9a-fA-F]{8}$")

STRING = "STRING"


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | op | STRING
    text: str
    line: int


def tokenize(text: str) -> tuple[list[Token], list[str]]:
    """Split source into tokens, dropping comments and string contents.

    Raises UnparsableInput on an unterminated comment or string literal.
    """
    tokens: list[Token] = []
    warnings: list[str] = []
    i, n, line = 0, len(text), 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch.isspace():
            m = _SPACE.match(text, i)
            line += text.count("\n", i, m.end())
            i = m.end()
            continue
        if text.startswith("//", i):
            end = text.find("\n", i)
            i = n if end < 0 else end
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise UnparsableInput(f"line {line}: unterminated block comment")
            line += text.count("\n", i, end)
            i = end + 2
            continue
        if ch in "\"'":
            j = i + 1
            while j < n and text[j] != ch:
                if text[j] == "\n":
                    raise UnparsableInput(f"line {line}: unterminated string literal")
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                raise UnparsableInput(f"line {line}: unterminated string literal")
            tokens.append(Token(STRING, '""', line))
            i = j + 1
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(Token("ident", m.group(), line))
            i = m.end()
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(Token("number", m.group(), line))
            i = m.end()
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("op", op, line))
                i += len(op)
                break
        else:
            if ch in _PUNCT:
                tokens.append(Token("op", ch, line))
            else:
                warnings.append(f"line {line}: skipped unrecognized character {ch!r}")
            i += 1
    return tokens, warnings


def _joined(tokens: Iterable[Token]) -> str:
    return " ".join(t.text for t in tokens)


def _match_close(tokens: list[Token], start: int, open_: str = "{", close: str = "}") -> int:
    """Index of the token closing the bracket at ``start`` (or len(tokens))."""
    depth = 0
    for k in range(start, len(tokens)):
        t = tokens[k].text
        if t == open_:
            depth += 1
        elif t == close:
            depth -= 1
            if depth == 0:
                return k
    return len(tokens)


_ELEMENTARY_ALIASES = {"uint": "uint256", "int": "int256", "byte": "bytes1", "ufixed": "ufixed128x18", "fixed": "fixed128x18"}
_LOCATIONS = {"memory", "storage", "calldata", "indexed"}


def _param_type(tokens: list[Token]) -> str | None:
    """Canonical ABI-ish type of one parameter's tokens (name and location dropped)."""
    if not tokens:
        return None
    parts = [tokens[0].text]
    k = 1
    while k + 1 < len(tokens) and tokens[k].text == "." and tokens[k + 1].kind == "ident":
        parts.append(tokens[k + 1].text)
        k += 2
    base = ".".join(parts)
    base = _ELEMENTARY_ALIASES.get(base, base)
    if base == "address" and k < len(tokens) and tokens[k].text == "payable":
        k += 1
    suffix = ""
    while k < len(tokens) and tokens[k].text == "[":
        end = _match_close(tokens, k, "[", "]")
        suffix += "[" + "".join(t.text for t in tokens[k + 1:end]) + "]"
        k = end + 1
    return base + suffix


def _split_params(tokens: list[Token]) -> list[list[Token]]:
    groups: list[list[Token]] = [[]]
    depth = 0
    for t in tokens:
        if t.text in "([" and t.kind == "op":
            depth += 1
        elif t.text in ")]" and t.kind == "op":
            depth -= 1
        if t.text == "," and depth == 0:
            groups.append([])
        else:
            groups[-1].append(t)
    return [g for g in groups if g]


def _param_types(tokens: list[Token]) -> tuple[str, ...]:
    out = []
    for group in _split_params(tokens):
        group = [t for t in group if t.text not in _LOCATIONS]
        ty = _param_type(group)
        if ty is not None:
            out.append(ty)
    return tuple(out)


@dataclass
class _Block:
    kind: str  # contract | interface | library
    name: str
    start: int
    end: int


@dataclass
class _Function:
    name: str
    params: tuple[str, ...]
    modifiers: list[str]
    body: list[Token]
    block: _Block | None


def _blocks(tokens: list[Token]) -> list[_Block]:
    out = []
    for k, t in enumerate(tokens):
        if t.kind == "ident" and t.text in ("contract", "interface", "library") and k + 1 < len(tokens):
            if tokens[k + 1].kind != "ident":
                continue
            j = k + 2
            while j < len(tokens) and tokens[j].text not in ("{", ";"):
                j += 1
            if j < len(tokens) and tokens[j].text == "{":
                out.append(_Block(t.text, tokens[k + 1].text, j, _match_close(tokens, j)))
    return out


def _enclosing(blocks: list[_Block], index: int) -> _Block | None:
    best = None
    for b in blocks:
        if b.start < index < b.end and (best is None or b.start > best.start):
            best = b
    return best


def _functions(tokens: list[Token], blocks: list[_Block], warnings: list[str]) -> list[_Function]:
    out = []
    k = 0
    while k < len(tokens):
        t = tokens[k]
        if not (t.kind == "ident" and t.text == "function"):
            k += 1
            continue
        if k + 2 >= len(tokens) or tokens[k + 1].kind != "ident" or tokens[k + 2].text != "(":
            # function types such as `function (uint) external returns (bool)`
            k += 1
            continue
        name = tokens[k + 1].text
        close = _match_close(tokens, k + 2, "(", ")")
        if close >= len(tokens):
            warnings.append(f"line {t.line}: function {name} has no closing parenthesis")
            break
        params = _param_types(tokens[k + 3:close])
        j = close + 1
        modifiers: list[str] = []
        depth = 0
        while j < len(tokens):
            text = tokens[j].text
            if depth == 0 and text in ("{", ";"):
                break
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
            elif depth == 0 and tokens[j].kind == "ident":
                modifiers.append(text)
            j += 1
        body: list[Token] = []
        end = j
        if j < len(tokens) and tokens[j].text == "{":
            end = _match_close(tokens, j)
            body = tokens[j + 1:end]
        out.append(_Function(name, params, modifiers, body, _enclosing(blocks, k)))
        k = end + 1
    return out


def _mutability(modifiers: list[str]) -> str:
    if "returns" in modifiers:
        modifiers = modifiers[: modifiers.index("returns")]
    for m in ("pure", "view", "payable"):
        if m in modifiers:
            return m
    if "constant" in modifiers:
        return "view"
    return "nonpayable"


def _events(tokens: list[Token]) -> list[EventSig]:
    out = []
    for k, t in enumerate(tokens):
        if t.kind == "ident" and t.text == "event" and k + 2 < len(tokens):
            if tokens[k + 1].kind == "ident" and tokens[k + 2].text == "(":
                close = _match_close(tokens, k + 2, "(", ")")
                out.append(EventSig(tokens[k + 1].text, _param_types(tokens[k + 3:close])))
    return out


def _interface_ids(
    tokens: list[Token],
    functions: list[_Function],
    blocks: list[_Block],
    rules: DetectionRules,
    warnings: list[str],
) -> set[str]:
    ids: set[str] = set()
    for fn in functions:
        if fn.name == "supportsInterface":
            ids |= {t.text.lower() for t in fn.body if t.kind == "number" and _INTERFACE_HEX.match(t.text)}
    for k, t in enumerate(tokens):
        # bytes4 constant declarations: `bytes4 ... NAME = 0x........ ;`
        if t.text == "bytes4" and k + 1 < len(tokens):
            j = k + 1
            while j < len(tokens) and tokens[j].text not in (";", "=", ")", ","):
                j += 1
            if j + 1 < len(tokens) and tokens[j].text == "=" and _INTERFACE_HEX.match(tokens[j + 1].text):
                ids.add(tokens[j + 1].text.lower())

    declared: dict[str, list[str]] = {}
    for b in blocks:
        if b.kind == "interface":
            declared[b.name] = [f"{fn.name}({','.join(fn.params)})" for fn in functions if fn.block is b]
    for k in range(len(tokens) - 5):
        if (
            tokens[k].text == "type"
            and tokens[k + 1].text == "("
            and tokens[k + 3].text == ")"
            and tokens[k + 4].text == "."
            and tokens[k + 5].text == "interfaceId"
        ):
            name = tokens[k + 2].text
            sigs = declared.get(name) or rules.interfaces.get(name)
            if sigs:
                ids.add(interface_id(sigs))
            else:
                warnings.append(f"line {tokens[k].line}: cannot resolve type({name}).interfaceId")
    return ids


def _hints(tokens: list[Token], functions: list[_Function], rules: DetectionRules) -> set[str]:
    whole = _joined(tokens)
    found = set()
    for hint in rules.hints:
        if hint.scope == "source":
            if hint.matches(whole):
                found.add(hint.tag)
            continue
        for fn in functions:
            if hint.function_name and not re.search(hint.function_name, fn.name):
                continue
            if hint.matches(_joined(fn.body)):
                found.add(hint.tag)
                break
    return found


def _scan_source(text: str, rules: DetectionRules) -> ContractDescriptor:
    tokens, warnings = tokenize(text)
    if not tokens:
        raise UnparsableInput("input contains no source tokens")
    blocks = _blocks(tokens)
    funcs = _functions(tokens, blocks, warnings)

    exported = []
    for fn in funcs:
        if fn.block is not None and fn.block.kind == "interface":
            continue
        if "internal" in fn.modifiers or "private" in fn.modifiers:
            continue
        exported.append(FunctionSig(fn.name, fn.params, _mutability(fn.modifiers)))
    if not funcs:
        warnings.append("no function declarations found")

    contracts = [b for b in blocks if b.kind == "contract"]
    name = None
    if contracts:
        # the outermost, last-declared contract is conventionally the deployable one
        name = max(contracts, key=lambda b: b.start).name

    return ContractDescriptor(
        functions=tuple(exported),
        events=tuple(_events(tokens)),
        interface_ids=frozenset(_interface_ids(tokens, funcs, blocks, rules, warnings)),
        storage_hints=frozenset(_hints(tokens, funcs, rules)),
        contract_name=name,
        warnings=tuple(warnings),
    )


def _abi_type(entry: dict[str, Any]) -> str:
    ty = entry.get("type", "")
    if ty.startswith("tuple"):
        inner = ",".join(_abi_type(c) for c in entry.get("components", ()))
        return f"({inner}){ty[len('tuple'):]}"
    return _ELEMENTARY_ALIASES.get(ty, ty)


def _scan_abi(text: str) -> ContractDescriptor:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UnparsableInput(f"ABI is not valid JSON: {exc}") from None
    name = None
    if isinstance(doc, dict):
        name = doc.get("contractName")
        doc = doc.get("abi")
    if not isinstance(doc, list):
        raise UnparsableInput("ABI document must be a list of entries or an object with an 'abi' list")
    functions, events, warnings = [], [], []
    for entry in doc:
        if not isinstance(entry, dict):
            warnings.append(f"skipped non-object ABI entry {entry!r}")
            continue
        kind = entry.get("type", "function")
        params = tuple(_abi_type(i) for i in entry.get("inputs", ()))
        if kind == "function":
            mut = entry.get("stateMutability")
            if mut is None:
                mut = "view" if entry.get("constant") else "payable" if entry.get("payable") else "nonpayable"
            functions.append(FunctionSig(entry["name"], params, mut))
        elif kind == "event":
            events.append(EventSig(entry["name"], params))
        elif kind not in ("constructor", "fallback", "receive", "error"):
            warnings.append(f"skipped ABI entry of type {kind!r}")
    return ContractDescriptor(
        functions=tuple(functions), events=tuple(events), contract_name=name, warnings=tuple(warnings)
    )


_DEFAULT_RULES: DetectionRules | None = None


def default_rules() -> DetectionRules:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = load_rules(resources.RULES)
    return _DEFAULT_RULES


def scan_contract(source_text: str, rules: DetectionRules | None = None) -> ContractDescriptor:
    """Extract the public interface and storage hints of a contract.

    Input starting with ``[`` or ``{`` is read as a JSON ABI; anything else
    as Solidity-like source.
    """
    if rules is None:
        rules = default_rules()
    stripped = source_text.lstrip("﻿ \t\r\n")
    if not stripped:
        raise UnparsableInput("input is empty")
    if stripped[0] in "[{":
        return _scan_abi(stripped)
    return _scan_source(source_text, rules)

"""Stream MediaWiki XML dumps and turn wikitext pages into structured articles.

The wikitext handling is deliberately a subset of the MediaWiki grammar:
headings, internal/external links, templates, refs, comments, tables and
emphasis markup. Templates are stripped, never expanded.
"""

from __future__ import annotations

import html
import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import BinaryIO, Iterator


class DumpParseError(Exception):
    """Raised when the XML stream is malformed or truncated."""


@dataclass
class RawPage:
    title: str
    language: str
    markup: str
    namespace: int
    redirect: bool = False


@dataclass
class Section:
    heading: str
    level: int  # 2 = top level, mirrors <h2>
    paragraphs: list[str] = field(default_factory=list)


@dataclass
class Article:
    title: str
    language: str
    lead: list[str]
    sections: list[Section]


def normalize_text(s: str) -> str:
    """NFKC normalization plus whitespace collapse and control-char removal.

    Idempotent: applying it twice gives the same result as applying it once.
    """
    s = unicodedata.normalize("NFKC", s)
    out = []
    for ch in s:
        if ch.isspace():
            out.append(" ")
        elif unicodedata.category(ch).startswith("C"):
            continue
        else:
            out.append(ch)
    return re.sub(" +", " ", "".join(out)).strip()


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_dump(stream: BinaryIO, language: str) -> Iterator[RawPage]:
    """Yield pages from a MediaWiki pages XML export in document order.

    Memory use is constant in the dump size: processed elements are cleared
    as soon as each <page> ends. Raises DumpParseError with the byte offset
    on malformed XML; a stream truncated mid-page raises after the last
    complete page has been yielded.
    """
    try:
        context = ET.iterparse(stream, events=("start", "end"))
        root = None
        for event, elem in context:
            if event == "start":
                if root is None:
                    root = elem
                continue
            if _localname(elem.tag) != "page":
                continue
            title = ""
            ns = 0
            text = ""
            redirect = False
            for child in elem.iter():
                name = _localname(child.tag)
                if name == "title":
                    title = child.text or ""
                elif name == "ns":
                    try:
                        ns = int(child.text or 0)
                    except ValueError:
                        ns = 0
                elif name == "redirect":
                    redirect = True
                elif name == "text":
                    text = child.text or ""
            if title:
                yield RawPage(
                    title=title,
                    language=language,
                    markup=text,
                    namespace=ns,
                    redirect=redirect,
                )
            elem.clear()
            if root is not None:
                # drop already-emitted children kept alive by the root
                for child in list(root):
                    root.remove(child)
    except ET.ParseError as exc:
        offset = getattr(exc, "position", None)
        raise DumpParseError(
            f"malformed XML at line/column {offset}: {exc}"
        ) from exc


_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_OPEN_COMMENT_RE = re.compile(r"<!--.*", re.DOTALL)
_REF_RE = re.compile(r"<ref[^<>/]*/\s*>|<ref[^<>]*>.*?</ref\s*>", re.DOTALL | re.IGNORECASE)
_TABLE_INNER_RE = re.compile(r"\{\|(?:(?!\{\|).)*?\|\}", re.DOTALL)
_TEMPLATE_INNER_RE = re.compile(r"\{\{[^{}]*\}\}", re.DOTALL)
_LINK_INNER_RE = re.compile(r"\[\[([^\[\]|]*)(?:\|([^\[\]]*))?\]\]")
_EXT_LINK_RE = re.compile(r"\[(?:https?|ftp)://\S*(?:\s+([^\]]*))?\]", re.IGNORECASE)
_TAG_RE = re.compile(r"</?[a-zA-Z][^<>]*>")
_HEADING_RE = re.compile(r"^(={2,6})\s*(.*?)\s*=+\s*$")

# link targets whose whole construct is dropped rather than reduced to text
_MEDIA_PREFIXES = (
    "file:", "image:", "category:", "media:",
    "datei:", "bild:", "kategorie:",
    "fichier:", "image:", "catégorie:",
    "soubor:", "obrázek:", "kategorie:",
)


def _strip_media_links(text: str) -> str:
    """Remove [[File:...]]-style constructs, honouring nested brackets."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("[[", i):
            head = text[i + 2 : i + 30].lower()
            if any(head.startswith(p) for p in _MEDIA_PREFIXES):
                depth = 1
                j = i + 2
                while j < n and depth > 0:
                    if text.startswith("[[", j):
                        depth += 1
                        j += 2
                    elif text.startswith("]]", j):
                        depth -= 1
                        j += 2
                    else:
                        j += 1
                i = j
                continue
        out.append(text[i])
        i += 1
    return "".join(out)


def _strip_templates(text: str, counters: dict[str, int] | None) -> str:
    while True:
        text, n = _TEMPLATE_INNER_RE.subn("", text)
        if n == 0:
            break
    if "{{" in text:
        # unbalanced braces: drop from the marker to end of line
        if counters is not None:
            counters["unbalanced_braces"] = counters.get("unbalanced_braces", 0) + 1
        text = re.sub(r"\{\{[^\n]*", "", text)
    return text.replace("}}", "")


def _strip_tables(text: str) -> str:
    while True:
        text, n = _TABLE_INNER_RE.subn("", text)
        if n == 0:
            break
    return text


def _resolve_links(text: str) -> str:
    def repl(m: re.Match) -> str:
        target, display = m.group(1), m.group(2)
        return display if display is not None else target

    while True:
        text, n = _LINK_INNER_RE.subn(repl, text)
        if n == 0:
            break
    return text


def clean_wikitext(markup: str, counters: dict[str, int] | None = None) -> str:
    """Reduce raw wikitext to plain text with heading lines preserved."""
    text = _COMMENT_RE.sub("", markup)
    text = _OPEN_COMMENT_RE.sub("", text)
    text = _REF_RE.sub("", text)
    text = _strip_tables(text)
    text = _strip_templates(text, counters)
    text = _strip_media_links(text)
    text = _resolve_links(text)
    text = _EXT_LINK_RE.sub(lambda m: m.group(1) or "", text)
    text = text.replace("'''", "").replace("''", "")
    text = _TAG_RE.sub(" ", text)
    text = html.unescape(text)
    return text


def extract_article(page: RawPage, counters: dict[str, int] | None = None) -> Article | None:
    """Convert a raw page to an Article, or None when the lead is empty.

    Callers are expected to have filtered redirects and non-main namespaces.
    """
    text = clean_wikitext(page.markup, counters)

    lead: list[str] = []
    sections: list[Section] = []
    current: Section | None = None
    block: list[str] = []

    def flush_block() -> None:
        if not block:
            return
        para = normalize_text(" ".join(block))
        block.clear()
        if not para:
            return
        if current is None:
            lead.append(para)
        else:
            current.paragraphs.append(para)

    for line in text.split("\n"):
        m = _HEADING_RE.match(line.strip())
        if m:
            flush_block()
            heading = normalize_text(m.group(2))
            if not heading:
                continue
            level = min(len(m.group(1)), 6)
            current = Section(heading=heading, level=level)
            sections.append(current)
            continue
        stripped = line.strip()
        if not stripped:
            flush_block()
            continue
        if stripped[0] in "|!" or stripped.startswith("{|"):
            continue  # table remnants
        stripped = re.sub(r"^[*#:;]+\s*", "", stripped)
        if stripped:
            block.append(stripped)
    flush_block()

    sections = [s for s in sections if s.paragraphs or s.heading]
    if not lead:
        return None
    return Article(
        title=normalize_text(page.title),
        language=page.language,
        lead=lead,
        sections=sections,
    )

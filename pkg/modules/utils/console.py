#!/usr/bin/env python3
"""
控制台输出 - Console Output Helpers

- safe_print: 编码不支持时退回 ASCII 替换，Windows 控制台先把状态图标换成文字
- status_icon / format_summary_box: 套件汇总的统一格式
- write_text_file: UTF-8 写文件，自动创建父目录
"""

import logging
import sys
from pathlib import Path
from typing import Iterable, Tuple, Union

logger = logging.getLogger(__name__)

ICON_FALLBACKS = {
    '✅': '[通过]',
    '❌': '[失败]',
    '⚠️': '[警告]',
    'ℹ️': '[提示]',
    '💡': '[建议]',
    '📋': '[清单]',
    '🧪': '[测试]',
    '📄': '[文件]',
    '⏱️': '[超时]',
    '🔄': '[运行]',
}

BOX_WIDTH = 62


def normalize_for_console(text: str) -> str:
    """Windows 控制台上把图标替换成文字"""
    if not isinstance(text, str):
        text = str(text)
    if sys.platform.startswith('win'):
        for icon, plain in ICON_FALLBACKS.items():
            text = text.replace(icon, plain)
    return text


def safe_print(text: str = '', **kwargs) -> None:
    text = normalize_for_console(text)
    try:
        print(text, **kwargs)
    except UnicodeEncodeError:
        print(text.encode('ascii', errors='replace').decode('ascii'), **kwargs)


def status_icon(passed: bool) -> str:
    return '✅' if passed else '❌'


def format_summary_box(title: str, rows: Iterable[Tuple[str, bool]], footer: str = '') -> str:
    """
    把 (名称, 是否通过) 列表排成带边框的汇总

    Returns:
        多行字符串，不含末尾换行
    """
    rows = list(rows)
    passed = sum(1 for _, ok in rows if ok)
    lines = ['╔' + '═' * BOX_WIDTH + '╗', f"║ {title}".ljust(BOX_WIDTH + 1) + '║', '╠' + '═' * BOX_WIDTH + '╣']
    for name, ok in rows:
        lines.append(f"║ {status_icon(ok)} {name}".ljust(BOX_WIDTH) + '║')
    lines.append('╠' + '═' * BOX_WIDTH + '╣')
    lines.append(f"║ 通过 {passed}/{len(rows)} {footer}".ljust(BOX_WIDTH + 1) + '║')
    lines.append('╚' + '═' * BOX_WIDTH + '╝')
    return '\n'.join(lines)


def write_text_file(path: Union[str, Path], content: str) -> Path:
    """UTF-8、LF 换行写出文本"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(content)
    logger.debug(f"已写出 {path} ({len(content)} 字符)")
    return path

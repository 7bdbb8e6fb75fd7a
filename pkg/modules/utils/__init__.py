"""
Utilities Package - 工具包

包含：
- safe_print: 跨平台安全打印
- status_icon / format_summary_box: 套件汇总格式
- write_text_file: UTF-8 文件写出
"""

from .console import (
    normalize_for_console,
    safe_print,
    status_icon,
    format_summary_box,
    write_text_file,
)

__all__ = [
    'normalize_for_console',
    'safe_print',
    'status_icon',
    'format_summary_box',
    'write_text_file',
]

import collections

import numpy as np

__all__ = ['table_str', 'frame_str']


def _cell(value, fmt):
    if isinstance(value, (float, np.floating)) and not fmt:
        fmt = '.6g'
    if value is None:
        return ''
    return format(value, fmt)


def table_str(*data, **kwargs):
    """Renders a list of dicts as a plain-text table.

    Keyword arguments:
        columns     -- dict of column options (title, align, format, width,
                       order); defaults to every key, in first-seen order

    Returns:
        the table as a string
    """
    if len(data) == 1 and isinstance(data[0], (list, tuple)):
        data = data[0]

    columns = kwargs.get('columns')
    if columns is None:
        columns = collections.OrderedDict()
        for item in data:
            for key in item:
                columns.setdefault(key, {})
    columns = collections.OrderedDict((key, dict(options)) for key, options in columns.items())

    for position, (key, column) in enumerate(columns.items()):
        column.setdefault('title', key.replace('_', ' '))
        column.setdefault('align', '<' if position == 0 else '>')
        column.setdefault('format', '')
        column.setdefault('order', position)
        if 'width' not in column:
            cells = [_cell(item.get(key), column['format']) for item in data]
            column['width'] = max([len(column['title'])] + [len(cell) for cell in cells])

    ordered = sorted(columns.items(), key=lambda item: item[1]['order'])
    lines = [' '.join('{:{}{}}'.format(c['title'], c['align'], c['width']) for _, c in ordered)]
    for item in data:
        lines.append(' '.join(
            '{:{}{}}'.format(_cell(item.get(key), c['format']), c['align'], c['width'])
            for key, c in ordered))
    return '\n'.join(line.rstrip() for line in lines) + '\n'


def frame_str(frame, **kwargs):
    """table_str over the rows of a pandas DataFrame."""
    return table_str(frame.to_dict('records'), **kwargs)

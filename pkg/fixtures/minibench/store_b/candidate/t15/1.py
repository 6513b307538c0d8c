def scale_add(items, scale, offset):
    return [entry * scale + offset for entry in items]

def scale_add(values, factor, shift):
    return [value * factor + shift for value in values]

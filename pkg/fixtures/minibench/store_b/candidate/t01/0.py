def scale_values(values, factor:
    return [value * factor for value in values]

def double_all(values):
    return [value * 2 for value in values]

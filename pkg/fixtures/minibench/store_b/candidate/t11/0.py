def sort_desc(values):
    return sorted(values)

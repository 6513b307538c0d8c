def flatten_pairs(pairs):
    flat = []
    for left, right in pairs:
        flat.append(left)
        flat.append(right)
    return flat

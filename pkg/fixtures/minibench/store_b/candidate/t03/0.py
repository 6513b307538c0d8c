def checksum(seed, step):
    total = seed + step
    scaled = seed * step - 1
    partial = total + scaled
    total = seed + step
    scaled = seed * step - 1
    return partial

def checksum(seed, step):
    total = seed + step
    scaled = seed * step - 1
    return total + scaled

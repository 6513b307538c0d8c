def join_words(words, sep):
    # build the combined text
    combined = sep.join(words)
    # build the combined text
    return combined

def initials(words):
    letters = []
    for word in words:
        letters.append(word[0])
    return "".join(letters)

def shout(word):
    return word + "!"


def join_words(words, sep):
    out = ""
    for i in range(len(words)):
        if i > 0:
            out = out + sep
        out = out + words[i]
    return out

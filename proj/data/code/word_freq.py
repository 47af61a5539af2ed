# word frequencies in a sentence
def word_counts(sentence):
    counts = {}
    for word in sentence.split():
        counts[word] = counts.get(word, 0) + 1
    return counts


def most_common(counts):
    best_word = None
    best_total = 0
    for word, total in counts.items():
        if total > best_total:
            best_word = word
            best_total = total
    return best_word

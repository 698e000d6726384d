with open("a.txt", encoding="utf-8", newline="") as fh:
    text = fh.read()
print(text)

int is_vowel(char c) {
  char lower = c;
  if (c >= 'A' && c <= 'Z') lower = (char)(c - 'A' + 'a');
  return lower == 'a' || lower == 'e' || lower == 'i' || lower == 'o' ||
         lower == 'u';
}

int count_digits(const char buf[16]) {
  int n = 0;
  int i = 0;
  do {
    if (buf[i] >= '0' && buf[i] <= '9') n++;
    i++;
  } while (i < 16 && buf[i] != '\0');
  return n;
}

_Bool in_range(long v, long lo, long hi) {
  return !(v < lo) && !(v > hi);
}

#include <stdio.h>
#include <stdlib.h>

enum shape { kDot, kLine, kBox };

static int classify(int v) {
  switch (v % 3) {
    case 0:
      return kDot;
    case 1: {
      int w = v * 2;
      if (w > 10) return kBox;
      return kLine;
    }
    default:
      break;
  }
  return kBox;
}

static unsigned checksum(const char* s) {
  unsigned h = 5381;
  while (*s) h = h * 33u + (unsigned char)*s++;
  return h;
}

static int digits(int n) {
  int count = 0;
  do {
    n /= 10;
    count++;
  } while (n != 0);
  return count;
}

int main(int argc, char** argv) {
  int n = argc > 1 ? atoi(argv[1]) : 5;
  int i;
  int total = 0;
  for (i = 0; i < n; i++) {
    if (i == 2) continue;
    if (i > 40) break;
    total += classify(i);
    if (i % 2)
      total++;
    else if (i % 5 == 0)
      total += 2;
  }
  printf("total=%d digits=%d sum=%u\n", total, digits(total * 1234), checksum(argc > 2 ? argv[2] : "abc"));
  if (n < 0) abort();
  return total % 7;
}

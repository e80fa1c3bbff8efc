static int calls = 0;

int next_ticket(int base) {
  calls++;
  return base + calls;
}

int pure_twice(int v) {
  return v * 2;
}

void noop(int v) {
  (void)v;
}

int f(int a, int b) {
  if (a < b + 3) return 1;
  return 0;
}

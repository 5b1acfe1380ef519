method Sum3(a: int, b: int, c: int) returns (s: int)
  ensures s - c == a + b
{
  return a + b + c;
}

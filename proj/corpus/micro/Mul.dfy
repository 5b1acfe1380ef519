method Mul(a: int, b: int) returns (p: int)
  requires b >= 0
  ensures p == a * b
{
  var k := 0;
  p := 0;
  while (k < b)
    invariant 0 <= k && k <= b
    invariant p == a * k
  {
    p := p + a;
    k := k + 1;
  }
  return p;
}

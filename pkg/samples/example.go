package main

import "fmt"

func one() int {
	return 1
}

func incr(x int) int {
	return x + one()
}

func main() {
	fmt.Printf("%d\n", incr(one()))
}
